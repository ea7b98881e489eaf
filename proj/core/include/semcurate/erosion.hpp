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

#ifndef SEMCURATE_EROSION_HPP_
#define SEMCURATE_EROSION_HPP_

#include <optional>

#include "semcurate/components.hpp"
#include "semcurate/label_map.hpp"

namespace semcurate {

enum class RadiusMode { kLinear, kSqrt };

// Per-component erosion radius r = floor(lambda * |k|) (linear) or
// floor(lambda * sqrt(|k|)) (sqrt), then clipped by `radius_cap` and, when
// `cap_to_bbox` is set, by min(bbox width, bbox height) / 2.
struct ErosionPolicy {
  double lambda = 0.15;
  RadiusMode mode = RadiusMode::kLinear;
  std::optional<int> radius_cap;
  bool cap_to_bbox = true;
  Connectivity connectivity = Connectivity::kFour;

  void validate() const;
};

int erosion_radius(const Component& component, const ErosionPolicy& policy);

// Disc kernel: offset (dx, dy) belongs to the disc iff dx*dx + dy*dy <= r*r.
// Each component is eroded on its own binary mask; removed pixels become
// void. Outside the image counts as part of the mask, so components are not
// eaten from the image border.
SemanticMap erode_components(const SemanticMap& map, const ErosionPolicy& policy);

}  // namespace semcurate

#endif  // SEMCURATE_EROSION_HPP_
