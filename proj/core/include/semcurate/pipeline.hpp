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

#ifndef SEMCURATE_PIPELINE_HPP_
#define SEMCURATE_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semcurate/conditions.hpp"
#include "semcurate/erosion.hpp"
#include "semcurate/manifest.hpp"
#include "semcurate/mcoc.hpp"
#include "semcurate/metrics.hpp"
#include "semcurate/mock_workers.hpp"
#include "semcurate/sampling.hpp"
#include "semcurate/taxonomy.hpp"
#include "semcurate/worker.hpp"

namespace semcurate {

// One step of a subset recipe, e.g. {"op":"stride","stride":10}.
struct RecipeStep {
  std::string op;  // multiclass | stride | condition | rcs
  std::size_t min_classes = 2;
  std::size_t stride = 10;
  std::size_t offset = 0;
  std::set<std::string> allowed;
  RcsConfig rcs;

  bool operator==(const RecipeStep&) const = default;
};

struct PipelineConfig {
  std::filesystem::path source_manifest;
  std::optional<std::filesystem::path> mapping_file;  // identity when absent
  bool strict_mapping = true;

  std::size_t candidates = 10;  // N
  std::size_t select = 3;       // k
  double tau = 0.7;
  AcceptanceMode mode = AcceptanceMode::kLiteral;
  Connectivity connectivity = Connectivity::kFour;
  int crop_w = 2;
  int crop_h = 1;
  LabelPairing pairing = LabelPairing::kPseudo;

  // Worker commands; the in-process mocks are used when unset.
  std::optional<std::string> generator_command;
  std::optional<std::string> labeller_command;
  MockGeneratorOptions mock_generator;
  MockLabellerOptions mock_labeller;
  WorkerTimeouts timeouts;
  std::size_t retries = 2;

  std::size_t workers = 1;  // W
  std::uint64_t seed = 0;
  std::filesystem::path out_root = "out";

  std::vector<RecipeStep> recipe;
  ConditionSchedule schedule;
  ErosionPolicy erosion;

  // Throws Error(kConfig).
  void validate() const;
  // Content hash of everything that affects outputs (not workers/out/timeouts).
  std::string run_id() const;
};

PipelineConfig parse_config(std::string_view json_text,
                            const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& config);

struct CandidateRecord {
  std::size_t candidate_id = 0;
  std::string image_ref;
  std::string label_ref;  // re-estimated labels
  McocReport report;
};

struct CurationRecord {
  std::string source_id;
  std::string dataset;
  std::string input_key;   // content address of everything the record depends on
  std::string source_ref;  // harmonized, cropped source map inside the run dir
  std::vector<CandidateRecord> candidates;
  std::vector<std::size_t> ranked;
  std::vector<CuratedPair> selected;

  std::vector<std::size_t> rejected() const;
};

std::string serialize_record(const CurationRecord& record);
CurationRecord parse_record(std::string_view text);

// Supplies a lane's workers; called again after a retryable failure.
struct WorkerFactory {
  std::function<std::unique_ptr<Generator>(const std::filesystem::path& workdir)> generator;
  std::function<std::unique_ptr<Labeller>(const std::filesystem::path& workdir)> labeller;
};

// Subprocess workers when commands are configured, in-process mocks otherwise.
WorkerFactory default_worker_factory(const PipelineConfig& config, const ClassTaxonomy& taxonomy);

struct CurationOptions {
  // Stop after this many newly processed entries without writing the final
  // outputs, as if the run had been interrupted.
  std::optional<std::size_t> stop_after;
  std::optional<WorkerFactory> factory;
};

struct CurationFailure {
  std::string source_id;
  ErrorKind kind;
  std::string message;
};

struct CurationResult {
  std::filesystem::path run_dir;
  DatasetManifest curated;
  std::vector<CurationRecord> records;  // sorted by source id
  std::vector<CurationFailure> failures;
  std::size_t resumed = 0;  // entries skipped thanks to complete records
  bool interrupted = false;
};

// harmonize -> centre crop -> generate N -> pseudo-label -> score -> top k
// -> pair, per source entry. Output layout under `out_root/<run_id>/`:
// manifest.jsonl, audit.jsonl, summary.json, records/, sources/, images/,
// labels/.
CurationResult run_curation(const PipelineConfig& config, const ClassTaxonomy& taxonomy,
                            const CurationOptions& options = {});

// Applies `config.recipe` in order to the source manifest.
DatasetManifest apply_recipe(const DatasetManifest& manifest, const std::vector<RecipeStep>& recipe,
                             const ClassTaxonomy& taxonomy, std::size_t workers = 1);
// Writes the subset to `output` (refs rebased to its directory).
DatasetManifest run_subset(const PipelineConfig& config, const ClassTaxonomy& taxonomy,
                           const std::filesystem::path& output);

// Predictions and ground truth are matched by entry id. An empty `evaluated`
// set means the classes that occur in the ground truth.
IouReport run_evaluate(const DatasetManifest& predictions, const DatasetManifest& ground_truth,
                       const ClassSet& evaluated, const ClassTaxonomy& taxonomy,
                       std::size_t workers = 1);

ConditionSet run_conditions(const PipelineConfig& config, const ClassTaxonomy& taxonomy);

std::string recipe_to_json(const std::vector<RecipeStep>& recipe);
std::vector<RecipeStep> parse_recipe(std::string_view json_text);

}  // namespace semcurate

#endif  // SEMCURATE_PIPELINE_HPP_
