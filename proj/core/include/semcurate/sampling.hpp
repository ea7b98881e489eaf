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

#ifndef SEMCURATE_SAMPLING_HPP_
#define SEMCURATE_SAMPLING_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "semcurate/manifest.hpp"
#include "semcurate/taxonomy.hpp"

namespace semcurate {

// Pixel statistics of a manifest. Frequencies are fractions of all
// non-void pixels; the occurrence index lists, per class, the manifest
// positions whose label map contains that class.
struct ClassFrequencyTable {
  std::map<ClassId, std::uint64_t> pixel_counts;
  std::uint64_t total_pixels = 0;
  std::map<ClassId, std::vector<std::size_t>> occurrences;
  std::vector<std::string> entry_ids;  // manifest order the table was built from

  double frequency(ClassId c) const;
  std::map<ClassId, double> frequencies() const;
  bool operator==(const ClassFrequencyTable&) const = default;
};

ClassFrequencyTable class_frequencies(const DatasetManifest& manifest,
                                      const ClassTaxonomy& taxonomy, std::size_t workers = 1);

// Same statistics for maps already in memory; `ids` names each map.
ClassFrequencyTable class_frequencies(const std::vector<SemanticMap>& maps,
                                      const std::vector<std::string>& ids);

std::string serialize_frequency_table(const ClassFrequencyTable& table);
ClassFrequencyTable parse_frequency_table(std::string_view text);

// Frequency tables cached under `cache_dir`, keyed by the manifest's
// content hash. A cached table is reused only while every label file keeps
// its size and modification time; `verify_content` also compares hashes.
ClassFrequencyTable cached_class_frequencies(const std::filesystem::path& manifest_path,
                                             const ClassTaxonomy& taxonomy,
                                             const std::filesystem::path& cache_dir,
                                             bool verify_content = false,
                                             std::size_t workers = 1, bool* cache_hit = nullptr);

// Rarity logit for a class of frequency f at temperature T. The sampling
// probability is softmax over classes of this value.
using RarityScore = std::function<double(double frequency, double temperature)>;

// (1 - f) / T
double exponential_rarity(double frequency, double temperature);

// P(c) over classes with f_c > 0, computed with max-subtraction.
std::map<ClassId, double> rcs_class_distribution(const ClassFrequencyTable& table,
                                                 double temperature,
                                                 const RarityScore& rarity = exponential_rarity);

struct RcsConfig {
  double temperature = 0.05;
  std::size_t count = 1;
  bool with_replacement = false;
  std::uint64_t seed = 0;

  bool operator==(const RcsConfig&) const = default;
};

// Draw class c ~ P(c), then an entry uniformly among those containing c
// (unused ones only, without replacement; exhausted classes are redrawn).
// Entries keep draw order; with replacement, repeats get a `#<n>` id suffix.
DatasetManifest rcs_sample_subset(const DatasetManifest& manifest,
                                  const ClassFrequencyTable& table, const RcsConfig& config,
                                  const RarityScore& rarity = exponential_rarity);

// Class draws alone, for checking the sampler against the analytic P(c).
class RcsClassSampler {
 public:
  RcsClassSampler(const ClassFrequencyTable& table, double temperature, std::uint64_t seed,
                  const RarityScore& rarity = exponential_rarity);
  ClassId next();
  const std::map<ClassId, double>& distribution() const noexcept { return dist_; }

 private:
  std::map<ClassId, double> dist_;
  std::vector<ClassId> classes_;
  std::vector<double> weights_;
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

// Entries offset, offset + stride, ... in manifest order.
DatasetManifest stride_subset(const DatasetManifest& manifest, std::size_t stride,
                              std::size_t offset = 0);

// Entries whose label map has at least `min_classes` distinct non-void classes.
DatasetManifest filter_multiclass(const DatasetManifest& manifest, const ClassTaxonomy& taxonomy,
                                  std::size_t min_classes = 2, std::size_t workers = 1);

inline constexpr const char* kAnyCondition = "*";

// Entries whose condition tag is in `allowed`. Untagged entries survive only
// if `allowed` has the wildcard "*", which also admits every tag.
DatasetManifest filter_condition(const DatasetManifest& manifest,
                                 const std::set<std::string>& allowed);

}  // namespace semcurate

#endif  // SEMCURATE_SAMPLING_HPP_
