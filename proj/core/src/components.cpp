/* Copyright 2026 The semcurate Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "semcurate/components.hpp"

#include <algorithm>
#include <array>

namespace semcurate {

ComponentSet::ComponentSet(std::vector<Component> components, std::vector<std::int32_t> labels,
                           int width, int height, Connectivity connectivity)
    : components_(std::move(components)),
      labels_(std::move(labels)),
      width_(width),
      height_(height),
      connectivity_(connectivity) {}

ComponentSet connected_components(const SemanticMap& map, Connectivity connectivity) {
  static constexpr std::array<Pixel, 8> kOffsets = {
      Pixel{1, 0}, Pixel{-1, 0}, Pixel{0, 1}, Pixel{0, -1},
      Pixel{1, 1}, Pixel{-1, 1}, Pixel{1, -1}, Pixel{-1, -1}};
  const std::size_t n_offsets = connectivity == Connectivity::kEight ? 8 : 4;

  const int w = map.width();
  const int h = map.height();
  std::vector<std::int32_t> labels(map.size(), ComponentSet::kNoComponent);
  std::vector<Component> components;
  std::vector<Pixel> stack;

  auto idx = [w](int x, int y) {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const ClassId cls = map.at(x, y);
      if (cls == kVoidId || labels[idx(x, y)] != ComponentSet::kNoComponent) continue;

      const auto label = static_cast<std::int32_t>(components.size());
      Component comp{components.size(), cls, {}, {x, y, x, y}};
      labels[idx(x, y)] = label;
      stack.assign(1, Pixel{x, y});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        comp.pixels.push_back(p);
        for (std::size_t k = 0; k < n_offsets; ++k) {
          const int nx = p.x + kOffsets[k].x;
          const int ny = p.y + kOffsets[k].y;
          if (!map.contains(nx, ny) || map.at(nx, ny) != cls) continue;
          auto& l = labels[idx(nx, ny)];
          if (l != ComponentSet::kNoComponent) continue;
          l = label;
          stack.push_back({nx, ny});
        }
      }
      std::sort(comp.pixels.begin(), comp.pixels.end(), [](const Pixel& a, const Pixel& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
      });
      for (const Pixel& p : comp.pixels) {
        comp.bbox.min_x = std::min(comp.bbox.min_x, p.x);
        comp.bbox.max_x = std::max(comp.bbox.max_x, p.x);
        comp.bbox.min_y = std::min(comp.bbox.min_y, p.y);
        comp.bbox.max_y = std::max(comp.bbox.max_y, p.y);
      }
      components.push_back(std::move(comp));
    }
  }
  return ComponentSet(std::move(components), std::move(labels), w, h, connectivity);
}

}  // namespace semcurate
