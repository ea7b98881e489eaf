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

#ifndef SEMCURATE_CONDITIONS_HPP_
#define SEMCURATE_CONDITIONS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semcurate/erosion.hpp"
#include "semcurate/manifest.hpp"

namespace semcurate {

class ClassTaxonomy;

// Which conditioning input a generator training step receives.
enum class ConditionKind { kFull, kCoarse, kDepth, kBlack };

std::string_view to_string(ConditionKind kind);
ConditionKind parse_condition_kind(std::string_view text);

// Probabilities of replacing the full pseudo-label; the remainder is Full.
struct ConditionSchedule {
  double p_depth = 0.20;
  double p_black = 0.10;
  double p_coarse = 0.20;
  std::uint64_t seed = 0;

  void validate() const;
};

// Pure function of (schedule.seed, step).
ConditionKind sample_condition(const ConditionSchedule& schedule, std::uint64_t step);

struct ConditionRecord {
  std::uint64_t step = 0;
  std::string entry_id;
  ConditionKind kind = ConditionKind::kFull;
  std::optional<std::string> label_ref;   // Full, Coarse
  std::optional<std::string> eroded_ref;  // Coarse
  std::optional<std::string> depth_ref;   // Depth: slot filled by a depth worker

  bool operator==(const ConditionRecord&) const = default;
};

std::string serialize_condition_record(const ConditionRecord& record);
ConditionRecord parse_condition_record(std::string_view line);

struct ConditionSet {
  std::vector<ConditionRecord> records;  // sorted by entry id
  DatasetManifest manifest;              // one entry per record
};

// Step i is the i-th entry of `manifest` in its given order. Writes
// `conditions.jsonl`, `manifest.jsonl` and eroded maps under `out_dir`.
// Refs in the output are relative to `out_dir`.
ConditionSet emit_condition_set(const DatasetManifest& manifest,
                                const ConditionSchedule& schedule,
                                const ErosionPolicy& policy,
                                const ClassTaxonomy& taxonomy,
                                const std::filesystem::path& out_dir,
                                std::size_t workers = 1);

}  // namespace semcurate

#endif  // SEMCURATE_CONDITIONS_HPP_
