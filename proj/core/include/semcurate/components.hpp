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

#ifndef SEMCURATE_COMPONENTS_HPP_
#define SEMCURATE_COMPONENTS_HPP_

#include <cstdint>
#include <vector>

#include "semcurate/label_map.hpp"

namespace semcurate {

enum class Connectivity : int { kFour = 4, kEight = 8 };

struct Pixel {
  int x;
  int y;
  bool operator==(const Pixel&) const = default;
};

struct BoundingBox {
  int min_x;
  int min_y;
  int max_x;  // inclusive
  int max_y;  // inclusive
  int width() const noexcept { return max_x - min_x + 1; }
  int height() const noexcept { return max_y - min_y + 1; }
};

// Maximal same-class connected region of non-void pixels.
struct Component {
  std::size_t component_id;
  ClassId class_id;
  std::vector<Pixel> pixels;  // scanline order
  BoundingBox bbox;

  std::size_t size() const noexcept { return pixels.size(); }
};

class ComponentSet {
 public:
  static constexpr std::int32_t kNoComponent = -1;

  ComponentSet(std::vector<Component> components, std::vector<std::int32_t> labels, int width,
               int height, Connectivity connectivity);

  const std::vector<Component>& components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }
  const Component& operator[](std::size_t i) const { return components_[i]; }
  Connectivity connectivity() const noexcept { return connectivity_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  // Index of the component covering (x, y), or kNoComponent for void.
  std::int32_t label_at(int x, int y) const {
    return labels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                   static_cast<std::size_t>(x)];
  }
  const std::vector<std::int32_t>& labels() const noexcept { return labels_; }

 private:
  std::vector<Component> components_;
  std::vector<std::int32_t> labels_;
  int width_;
  int height_;
  Connectivity connectivity_;
};

// Components are ordered by the scanline position of their first pixel.
ComponentSet connected_components(const SemanticMap& map,
                                  Connectivity connectivity = Connectivity::kFour);

}  // namespace semcurate

#endif  // SEMCURATE_COMPONENTS_HPP_
