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
#include "semcurate/erosion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "semcurate/error.hpp"

namespace semcurate {
namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// One-dimensional squared distance transform of a sampled function
// (lower envelope of parabolas). `f` is read and `d` written with `stride`.
void edt_1d(const std::int64_t* f, std::int64_t* d, int n, std::size_t stride,
            std::vector<int>& v, std::vector<double>& z) {
  v.assign(static_cast<std::size_t>(n), 0);
  z.assign(static_cast<std::size_t>(n) + 1, 0.0);
  auto at = [&](int q) { return f[static_cast<std::size_t>(q) * stride]; };

  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (at(q) >= kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -std::numeric_limits<double>::infinity();
      z[1] = std::numeric_limits<double>::infinity();
      continue;
    }
    // z[0] is -inf, so k never drops below zero.
    double s;
    for (;;) {
      const int p = v[static_cast<std::size_t>(k)];
      s = (static_cast<double>(at(q) + static_cast<std::int64_t>(q) * q) -
           static_cast<double>(at(p) + static_cast<std::int64_t>(p) * p)) /
          (2.0 * (q - p));
      if (s > z[static_cast<std::size_t>(k)]) break;
      --k;
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = std::numeric_limits<double>::infinity();
  }

  if (k < 0) {
    for (int q = 0; q < n; ++q) d[static_cast<std::size_t>(q) * stride] = kInf;
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(j) + 1] < q) ++j;
    const std::int64_t p = v[static_cast<std::size_t>(j)];
    const std::int64_t dq = q - p;
    d[static_cast<std::size_t>(q) * stride] = dq * dq + at(static_cast<int>(p));
  }
}

// Squared Euclidean distance to the nearest zero cell, in place.
void squared_edt(std::vector<std::int64_t>& grid, int w, int h) {
  std::vector<std::int64_t> tmp(grid.size());
  std::vector<int> v;
  std::vector<double> z;
  for (int x = 0; x < w; ++x) {
    edt_1d(grid.data() + x, tmp.data() + x, h, static_cast<std::size_t>(w), v, z);
  }
  for (int y = 0; y < h; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * static_cast<std::size_t>(w);
    edt_1d(tmp.data() + row, grid.data() + row, w, 1, v, z);
  }
}

}  // namespace

void ErosionPolicy::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::kInvalidArgument, "erosion lambda must be a finite value >= 0");
  }
  if (radius_cap && *radius_cap < 0) {
    throw Error(ErrorKind::kInvalidArgument, "erosion radius cap must be >= 0");
  }
}

int erosion_radius(const Component& component, const ErosionPolicy& policy) {
  const double size = static_cast<double>(component.size());
  const double raw = policy.mode == RadiusMode::kLinear ? policy.lambda * size
                                                        : policy.lambda * std::sqrt(size);
  // Small slack so products like 0.15 * 20 land on the intended integer.
  double r = std::floor(raw + 1e-9);
  if (policy.radius_cap) r = std::min(r, static_cast<double>(*policy.radius_cap));
  if (policy.cap_to_bbox) {
    r = std::min(r, static_cast<double>(
                        std::min(component.bbox.width(), component.bbox.height()) / 2));
  }
  return static_cast<int>(std::max(0.0, std::min(r, 1e9)));
}

SemanticMap erode_components(const SemanticMap& map, const ErosionPolicy& policy) {
  policy.validate();
  const ComponentSet comps = connected_components(map, policy.connectivity);
  SemanticMap out(map.width(), map.height());

  std::vector<std::int64_t> grid;
  for (const Component& comp : comps.components()) {
    const int r = erosion_radius(comp, policy);
    if (r == 0) {
      for (const Pixel& p : comp.pixels) out.set(p.x, p.y, comp.class_id);
      continue;
    }

    // Every background pixel within distance r of the component lies in
    // the bbox grown by r.
    const std::int64_t r64 = r;
    const int x0 = static_cast<int>(std::max<std::int64_t>(0, comp.bbox.min_x - r64));
    const int y0 = static_cast<int>(std::max<std::int64_t>(0, comp.bbox.min_y - r64));
    const int x1 = static_cast<int>(std::min<std::int64_t>(map.width() - 1, comp.bbox.max_x + r64));
    const int y1 = static_cast<int>(std::min<std::int64_t>(map.height() - 1, comp.bbox.max_y + r64));
    const int rw = x1 - x0 + 1;
    const int rh = y1 - y0 + 1;

    grid.assign(static_cast<std::size_t>(rw) * static_cast<std::size_t>(rh), kInf);
    const auto label = static_cast<std::int32_t>(comp.component_id);
    bool any_background = false;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (comps.label_at(x, y) != label) {
          grid[static_cast<std::size_t>(y - y0) * static_cast<std::size_t>(rw) +
               static_cast<std::size_t>(x - x0)] = 0;
          any_background = true;
        }
      }
    }
    if (!any_background) {
      for (const Pixel& p : comp.pixels) out.set(p.x, p.y, comp.class_id);
      continue;
    }
    squared_edt(grid, rw, rh);
    const std::int64_t r2 = r64 * r64;
    for (const Pixel& p : comp.pixels) {
      const std::int64_t d2 = grid[static_cast<std::size_t>(p.y - y0) * static_cast<std::size_t>(rw) +
                                   static_cast<std::size_t>(p.x - x0)];
      if (d2 > r2) out.set(p.x, p.y, comp.class_id);
    }
  }
  return out;
}

}  // namespace semcurate
