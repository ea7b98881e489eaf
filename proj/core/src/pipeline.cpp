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
#include "semcurate/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>

#include "json.hpp"
#include "semcurate/components.hpp"
#include "semcurate/error.hpp"
#include "semcurate/hash.hpp"
#include "semcurate/parallel.hpp"

namespace semcurate {
namespace {

using nlohmann::json;

std::span<const std::uint8_t> as_bytes(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file_bytes(path, as_bytes(text));
}

std::string read_text(const std::filesystem::path& path) {
  auto bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::kConfig, msg); }

json recipe_step_json(const RecipeStep& s) {
  json j = {{"op", s.op}};
  if (s.op == "multiclass") {
    j["min_classes"] = s.min_classes;
  } else if (s.op == "stride") {
    j["stride"] = s.stride;
    j["offset"] = s.offset;
  } else if (s.op == "condition") {
    j["allowed"] = s.allowed;
  } else if (s.op == "rcs") {
    j["count"] = s.rcs.count;
    j["temperature"] = s.rcs.temperature;
    j["with_replacement"] = s.rcs.with_replacement;
    j["seed"] = s.rcs.seed;
  }
  return j;
}

RecipeStep recipe_step_from(const json& j) {
  RecipeStep s;
  s.op = j.at("op").get<std::string>();
  if (s.op == "multiclass") {
    s.min_classes = j.value("min_classes", std::size_t{2});
  } else if (s.op == "stride") {
    s.stride = j.value("stride", std::size_t{10});
    s.offset = j.value("offset", std::size_t{0});
  } else if (s.op == "condition") {
    s.allowed = j.at("allowed").get<std::set<std::string>>();
  } else if (s.op == "rcs") {
    s.rcs.count = j.at("count").get<std::size_t>();
    s.rcs.temperature = j.value("temperature", 0.05);
    s.rcs.with_replacement = j.value("with_replacement", false);
    s.rcs.seed = j.value("seed", std::uint64_t{0});
  } else {
    config_error("recipe references unknown op '" + s.op + "'");
  }
  return s;
}

json config_json(const PipelineConfig& c, bool for_hash) {
  json mock_gen = {{"corruption", c.mock_generator.corruption}, {"jitter", c.mock_generator.jitter}};
  json by_index = json::object();
  for (const auto& [i, p] : c.mock_generator.corruption_by_index) by_index[std::to_string(i)] = p;
  mock_gen["corruption_by_index"] = by_index;

  json recipe = json::array();
  for (const auto& s : c.recipe) recipe.push_back(recipe_step_json(s));

  json j = {
      {"source_manifest", c.source_manifest.generic_string()},
      {"mapping", c.mapping_file ? json(c.mapping_file->generic_string()) : json(nullptr)},
      {"strict_mapping", c.strict_mapping},
      {"N", c.candidates},
      {"k", c.select},
      {"tau", c.tau},
      {"mode", std::string(to_string(c.mode))},
      {"connectivity", static_cast<int>(c.connectivity)},
      {"crop", {c.crop_w, c.crop_h}},
      {"pairing", std::string(to_string(c.pairing))},
      {"generator", c.generator_command ? json(*c.generator_command) : json(nullptr)},
      {"labeller", c.labeller_command ? json(*c.labeller_command) : json(nullptr)},
      {"mock",
       {{"generator", mock_gen},
        {"labeller", {{"noise_rate", c.mock_labeller.noise_rate}, {"seed", c.mock_labeller.seed}}}}},
      {"retries", c.retries},
      {"seed", c.seed},
      {"recipe", recipe},
      {"schedule",
       {{"p_depth", c.schedule.p_depth}, {"p_black", c.schedule.p_black}, {"p_coarse", c.schedule.p_coarse}}},
      {"erosion",
       {{"lambda", c.erosion.lambda},
        {"radius_mode", c.erosion.mode == RadiusMode::kSqrt ? "sqrt" : "linear"},
        {"radius_cap", c.erosion.radius_cap ? json(*c.erosion.radius_cap) : json(nullptr)},
        {"cap_to_bbox", c.erosion.cap_to_bbox},
        {"connectivity", static_cast<int>(c.erosion.connectivity)}}},
  };
  if (!for_hash) {
    j["workers"] = c.workers;
    j["out"] = c.out_root.generic_string();
    j["timeouts"] = {{"handshake_ms", c.timeouts.handshake.count()},
                     {"generate_ms", c.timeouts.generate.count()},
                     {"label_ms", c.timeouts.label.count()}};
  }
  return j;
}

Connectivity connectivity_from(int v) {
  if (v == 4) return Connectivity::kFour;
  if (v == 8) return Connectivity::kEight;
  config_error("connectivity must be 4 or 8");
}

}  // namespace

void PipelineConfig::validate() const {
  if (source_manifest.empty()) config_error("source_manifest is required");
  if (candidates == 0) config_error("N must be >= 1");
  if (select == 0 || select > candidates) config_error("k must satisfy 1 <= k <= N");
  if (!(tau > 0.0 && tau <= 1.0)) config_error("tau must lie in (0, 1]");
  if (crop_w <= 0 || crop_h <= 0) config_error("crop ratio must be positive");
  if (workers == 0) config_error("workers must be >= 1");
  if (mock_generator.corruption < 0.0 || mock_generator.corruption > 1.0) {
    config_error("mock corruption must lie in [0, 1]");
  }
  for (const auto& [i, p] : mock_generator.corruption_by_index) {
    if (p < 0.0 || p > 1.0) config_error("mock corruption must lie in [0, 1]");
  }
  if (mock_labeller.noise_rate < 0.0 || mock_labeller.noise_rate > 1.0) {
    config_error("mock noise rate must lie in [0, 1]");
  }
  try {
    schedule.validate();
    erosion.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  for (const auto& s : recipe) {
    if (s.op != "multiclass" && s.op != "stride" && s.op != "condition" && s.op != "rcs") {
      config_error("recipe references unknown op '" + s.op + "'");
    }
  }
}

std::string PipelineConfig::run_id() const {
  return sha256_hex(config_json(*this, true).dump()).substr(0, 16);
}

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("config must be a JSON object");

  auto path_of = [&](const std::string& s) {
    std::filesystem::path p(s);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };

  PipelineConfig c;
  try {
    if (j.contains("source_manifest")) c.source_manifest = path_of(j.at("source_manifest").get<std::string>());
    if (j.contains("mapping") && !j.at("mapping").is_null()) c.mapping_file = path_of(j.at("mapping").get<std::string>());
    c.strict_mapping = j.value("strict_mapping", c.strict_mapping);
    c.candidates = j.value("N", c.candidates);
    c.select = j.value("k", c.select);
    c.tau = j.value("tau", c.tau);
    if (j.contains("mode")) c.mode = parse_acceptance_mode(j.at("mode").get<std::string>());
    if (j.contains("connectivity")) c.connectivity = connectivity_from(j.at("connectivity").get<int>());
    if (j.contains("crop")) {
      const auto crop = j.at("crop").get<std::vector<int>>();
      if (crop.size() != 2) config_error("crop must be [w, h]");
      c.crop_w = crop[0];
      c.crop_h = crop[1];
    }
    if (j.contains("pairing")) c.pairing = parse_label_pairing(j.at("pairing").get<std::string>());
    if (j.contains("generator") && !j.at("generator").is_null()) c.generator_command = j.at("generator").get<std::string>();
    if (j.contains("labeller") && !j.at("labeller").is_null()) c.labeller_command = j.at("labeller").get<std::string>();
    if (j.contains("mock")) {
      const auto& m = j.at("mock");
      if (m.contains("generator")) {
        const auto& g = m.at("generator");
        c.mock_generator.corruption = g.value("corruption", 0.0);
        c.mock_generator.jitter = g.value("jitter", 8);
        if (g.contains("corruption_by_index")) {
          for (const auto& [k, v] : g.at("corruption_by_index").items()) {
            c.mock_generator.corruption_by_index[static_cast<std::uint32_t>(std::stoul(k))] = v.get<double>();
          }
        }
      }
      if (m.contains("labeller")) {
        c.mock_labeller.noise_rate = m.at("labeller").value("noise_rate", 0.0);
        c.mock_labeller.seed = m.at("labeller").value("seed", std::uint64_t{0});
      }
    }
    c.retries = j.value("retries", c.retries);
    c.workers = j.value("workers", c.workers);
    c.seed = j.value("seed", c.seed);
    if (j.contains("out")) c.out_root = path_of(j.at("out").get<std::string>());
    if (j.contains("timeouts")) {
      const auto& t = j.at("timeouts");
      c.timeouts.handshake = std::chrono::milliseconds(t.value("handshake_ms", c.timeouts.handshake.count()));
      c.timeouts.generate = std::chrono::milliseconds(t.value("generate_ms", c.timeouts.generate.count()));
      c.timeouts.label = std::chrono::milliseconds(t.value("label_ms", c.timeouts.label.count()));
    }
    if (j.contains("recipe")) {
      for (const auto& s : j.at("recipe")) c.recipe.push_back(recipe_step_from(s));
    }
    if (j.contains("schedule")) {
      const auto& s = j.at("schedule");
      c.schedule.p_depth = s.value("p_depth", c.schedule.p_depth);
      c.schedule.p_black = s.value("p_black", c.schedule.p_black);
      c.schedule.p_coarse = s.value("p_coarse", c.schedule.p_coarse);
    }
    if (j.contains("erosion")) {
      const auto& e = j.at("erosion");
      c.erosion.lambda = e.value("lambda", c.erosion.lambda);
      const auto mode = e.value("radius_mode", std::string("linear"));
      if (mode != "linear" && mode != "sqrt") config_error("radius_mode must be linear or sqrt");
      c.erosion.mode = mode == "sqrt" ? RadiusMode::kSqrt : RadiusMode::kLinear;
      if (e.contains("radius_cap") && !e.at("radius_cap").is_null()) c.erosion.radius_cap = e.at("radius_cap").get<int>();
      c.erosion.cap_to_bbox = e.value("cap_to_bbox", c.erosion.cap_to_bbox);
      if (e.contains("connectivity")) c.erosion.connectivity = connectivity_from(e.at("connectivity").get<int>());
    }
  } catch (const json::exception& e) {
    config_error(std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    config_error(e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const Error& e) {
    config_error(e.what());
  }
  return parse_config(text, path.parent_path());
}

std::string config_to_json(const PipelineConfig& config) { return config_json(config, false).dump(2); }

std::string recipe_to_json(const std::vector<RecipeStep>& recipe) {
  json j = json::array();
  for (const auto& s : recipe) j.push_back(recipe_step_json(s));
  return j.dump();
}

std::vector<RecipeStep> parse_recipe(std::string_view text) {
  std::vector<RecipeStep> recipe;
  try {
    for (const auto& s : json::parse(text)) recipe.push_back(recipe_step_from(s));
  } catch (const json::exception& e) {
    config_error(std::string("recipe: ") + e.what());
  }
  return recipe;
}

// ---------------------------------------------------------------------------
// Curation records

std::vector<std::size_t> CurationRecord::rejected() const {
  std::vector<std::size_t> out;
  for (const auto& c : candidates) {
    const bool chosen = std::any_of(selected.begin(), selected.end(),
                                    [&](const CuratedPair& p) { return p.candidate_id == c.candidate_id; });
    if (!chosen) out.push_back(c.candidate_id);
  }
  return out;
}

std::string serialize_record(const CurationRecord& r) {
  json cands = json::array();
  for (const auto& c : r.candidates) {
    cands.push_back({{"candidate", c.candidate_id},
                     {"image", c.image_ref},
                     {"label", c.label_ref},
                     {"report", json::parse(serialize_report(c.report))}});
  }
  json sel = json::array();
  for (const auto& p : r.selected) {
    sel.push_back({{"candidate", p.candidate_id},
                   {"image", p.image_ref},
                   {"label", p.label_ref},
                   {"score_exact", rational_string(p.score)}});
  }
  json rejected = json::array();
  for (std::size_t id : r.rejected()) {
    for (const auto& c : r.candidates) {
      if (c.candidate_id == id) rejected.push_back({{"candidate", id}, {"score", c.report.score()}});
    }
  }
  return json{{"source_id", r.source_id},
              {"dataset", r.dataset},
              {"input_key", r.input_key},
              {"source_ref", r.source_ref},
              {"ranked", r.ranked},
              {"candidates", cands},
              {"selected", sel},
              {"rejected", rejected}}
      .dump();
}

CurationRecord parse_record(std::string_view text) {
  try {
    const json j = json::parse(text);
    CurationRecord r;
    r.source_id = j.at("source_id").get<std::string>();
    r.dataset = j.at("dataset").get<std::string>();
    r.input_key = j.at("input_key").get<std::string>();
    r.source_ref = j.at("source_ref").get<std::string>();
    r.ranked = j.at("ranked").get<std::vector<std::size_t>>();
    for (const auto& c : j.at("candidates")) {
      CandidateRecord cr;
      cr.candidate_id = c.at("candidate").get<std::size_t>();
      cr.image_ref = c.at("image").get<std::string>();
      cr.label_ref = c.at("label").get<std::string>();
      cr.report = parse_report(c.at("report").dump());
      r.candidates.push_back(std::move(cr));
    }
    for (const auto& p : j.at("selected")) {
      CuratedPair cp;
      cp.source_id = r.source_id;
      cp.candidate_id = p.at("candidate").get<std::size_t>();
      cp.image_ref = p.at("image").get<std::string>();
      cp.label_ref = p.at("label").get<std::string>();
      cp.score = parse_rational(p.at("score_exact").get<std::string>());
      r.selected.push_back(std::move(cp));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("curation record: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Workers

WorkerFactory default_worker_factory(const PipelineConfig& config, const ClassTaxonomy& taxonomy) {
  WorkerFactory f;
  if (config.generator_command) {
    f.generator = [cmd = *config.generator_command, t = config.timeouts](const std::filesystem::path& wd) {
      return std::unique_ptr<Generator>(ProcessWorker::spawn(WorkerRole::kGenerator, cmd, wd, t));
    };
  } else {
    f.generator = [&taxonomy, opts = config.mock_generator](const std::filesystem::path& wd) {
      return std::unique_ptr<Generator>(std::make_unique<MockGeneratorWorker>(wd, taxonomy, opts));
    };
  }
  if (config.labeller_command) {
    f.labeller = [cmd = *config.labeller_command, t = config.timeouts](const std::filesystem::path& wd) {
      return std::unique_ptr<Labeller>(ProcessWorker::spawn(WorkerRole::kLabeller, cmd, wd, t));
    };
  } else {
    f.labeller = [&taxonomy, opts = config.mock_labeller](const std::filesystem::path& wd) {
      return std::unique_ptr<Labeller>(std::make_unique<MockLabellerWorker>(wd, taxonomy, opts));
    };
  }
  return f;
}

// ---------------------------------------------------------------------------
// Curation

namespace {

struct Lane {
  std::unique_ptr<Generator> generator;
  std::unique_ptr<Labeller> labeller;
};

class EntryRunner {
 public:
  EntryRunner(const PipelineConfig& config, const ClassTaxonomy& taxonomy,
              const DatasetMapping& mapping, const WorkerFactory& factory,
              std::filesystem::path run_dir)
      : config_(config),
        taxonomy_(taxonomy),
        mapping_(mapping),
        factory_(factory),
        run_dir_(std::move(run_dir)) {}

  CurationRecord run(const DatasetManifest& source, const ManifestEntry& entry,
                     const std::string& input_key, Lane& lane) const {
    const std::string name = safe_name(entry.id);

    const SemanticMap raw = load_raw_label_map(source.resolve(entry.label_ref));
    const SemanticMap harmonized = harmonize(raw, mapping_, config_.strict_mapping);
    const SemanticMap cropped = center_crop_ratio(harmonized, config_.crop_w, config_.crop_h);
    const ComponentSet components = connected_components(cropped, config_.connectivity);
    if (components.size() == 0) {
      throw Error(ErrorKind::kValidation, "source map is entirely void after harmonization");
    }

    CurationRecord record;
    record.source_id = entry.id;
    record.dataset = entry.dataset;
    record.input_key = input_key;
    record.source_ref = "sources/" + name + ".png";
    save_label_map(run_dir_ / record.source_ref, cropped);
    std::filesystem::create_directories(run_dir_ / "images" / name);
    std::filesystem::create_directories(run_dir_ / "labels" / name);

    const std::uint64_t request_seed = derive_seed(config_.seed, entry.id, 0);
    const auto n = static_cast<std::uint32_t>(config_.candidates);
    const auto images = with_retry(lane, [&] {
      return lane.generator->generate(record.source_ref, request_seed, n, "images/" + name + "/cand");
    });

    ScoreOptions score_options{config_.tau, config_.mode, config_.connectivity};
    std::vector<McocReport> reports;
    std::map<std::size_t, CandidateFiles> files;
    for (std::size_t i = 0; i < images.size(); ++i) {
      const std::string out = "labels/" + name + "/cand_" + std::to_string(i) + ".png";
      const std::string label_ref = with_retry(lane, [&] { return lane.labeller->label(images[i], out); });
      SemanticMap prediction(1, 1);
      try {
        prediction = load_label_map(run_dir_ / label_ref, taxonomy_);
      } catch (const Error& e) {
        throw Error(e.kind(), "candidate " + std::to_string(i) + " of '" + entry.id + "': " + e.what());
      }
      if (!prediction.same_shape(cropped)) {
        throw Error(ErrorKind::kValidation,
                    "candidate " + std::to_string(i) + " of '" + entry.id +
                        "': pseudo-label dimensions differ from the source map");
      }
      McocReport report = score_candidate(components, prediction, score_options, i);
      reports.push_back(report);
      files[i] = CandidateFiles{images[i], label_ref};
      record.candidates.push_back({i, images[i], label_ref, std::move(report)});
    }

    SelectionResult selection = rank_and_select(entry.id, std::move(reports), config_.select);
    record.ranked = selection.ranked;
    record.selected = pair_with_pseudolabels(selection, files, config_.pairing, record.source_ref);
    return record;
  }

 private:
  template <typename Fn>
  auto with_retry(Lane& lane, Fn&& fn) const -> decltype(fn()) {
    for (std::size_t attempt = 0;; ++attempt) {
      try {
        if (!lane.generator) lane.generator = factory_.generator(run_dir_);
        if (!lane.labeller) lane.labeller = factory_.labeller(run_dir_);
        return fn();
      } catch (const Error& e) {
        // A worker that failed at the process or protocol level is not
        // reused, whether or not the request is retried.
        if (e.retryable() || e.kind() == ErrorKind::kProtocol) {
          lane.generator.reset();
          lane.labeller.reset();
        }
        if (!e.retryable() || attempt >= config_.retries) throw;
      }
    }
  }

  const PipelineConfig& config_;
  const ClassTaxonomy& taxonomy_;
  const DatasetMapping& mapping_;
  const WorkerFactory& factory_;
  std::filesystem::path run_dir_;
};

std::optional<CurationRecord> load_complete_record(const std::filesystem::path& path,
                                                   const std::string& input_key,
                                                   const std::filesystem::path& run_dir) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    CurationRecord r = parse_record(read_text(path));
    if (r.input_key != input_key) return std::nullopt;
    if (!std::filesystem::exists(run_dir / r.source_ref)) return std::nullopt;
    for (const auto& c : r.candidates) {
      if (!std::filesystem::exists(run_dir / c.image_ref) ||
          !std::filesystem::exists(run_dir / c.label_ref)) {
        return std::nullopt;
      }
    }
    return r;
  } catch (const Error&) {
    return std::nullopt;
  }
}

json summary_json(const PipelineConfig& config, const std::vector<CurationRecord>& records,
                  const std::vector<CurationFailure>& failures, std::size_t total,
                  const ClassTaxonomy& taxonomy) {
  std::vector<std::size_t> hist_all(10, 0), hist_selected(10, 0);
  auto bin = [](double s) { return std::min<std::size_t>(9, static_cast<std::size_t>(std::floor(s * 10.0))); };
  Rational sum_all{0}, sum_selected{0};
  std::size_t n_all = 0, n_selected = 0;
  std::size_t comps = 0, comps_accepted = 0;
  std::map<ClassId, std::pair<std::size_t, std::size_t>> per_class;
  for (const auto& r : records) {
    for (const auto& c : r.candidates) {
      sum_all += c.report.score_exact;
      ++n_all;
      ++hist_all[bin(c.report.score())];
      for (const auto& [cls, acc] : c.report.per_class) {
        per_class[cls].first += acc.accepted;
        per_class[cls].second += acc.total;
      }
      for (const auto& s : c.report.per_component) {
        ++comps;
        comps_accepted += s.accepted ? 1 : 0;
      }
    }
    for (const auto& p : r.selected) {
      sum_selected += p.score;
      ++n_selected;
      ++hist_selected[bin(static_cast<double>(p.score))];
    }
  }
  json classes = json::object();
  for (const auto& [cls, counts] : per_class) {
    const std::string name = taxonomy.contains(cls) ? taxonomy.info(cls).name : std::to_string(cls);
    classes[name] = {{"accepted", counts.first},
                     {"total", counts.second},
                     {"rate", static_cast<double>(counts.first) / static_cast<double>(counts.second)}};
  }
  json fails = json::array();
  for (const auto& f : failures) {
    fails.push_back({{"source_id", f.source_id}, {"kind", std::string(to_string(f.kind))}, {"error", f.message}});
  }
  return json{
      {"run_id", config.run_id()},
      {"entries", total},
      {"completed", records.size()},
      {"failed", fails},
      {"candidates_scored", n_all},
      {"selected", n_selected},
      {"mean_mcoc_all", n_all ? static_cast<double>(sum_all / Rational(n_all)) : 0.0},
      {"mean_mcoc_selected", n_selected ? static_cast<double>(sum_selected / Rational(n_selected)) : 0.0},
      {"mcoc_histogram_all", hist_all},
      {"mcoc_histogram_selected", hist_selected},
      {"component_acceptance_rate",
       comps ? static_cast<double>(comps_accepted) / static_cast<double>(comps) : 0.0},
      {"class_acceptance", classes},
  };
}

}  // namespace

CurationResult run_curation(const PipelineConfig& config, const ClassTaxonomy& taxonomy,
                            const CurationOptions& options) {
  config.validate();
  const DatasetMapping mapping = config.mapping_file ? load_mapping(*config.mapping_file, taxonomy)
                                                     : DatasetMapping::identity(taxonomy);
  const std::string mapping_hash =
      config.mapping_file ? sha256_file_hex(*config.mapping_file) : std::string("identity");
  const DatasetManifest source = read_manifest(config.source_manifest);

  CurationResult result;
  result.run_dir = config.out_root / config.run_id();
  std::filesystem::create_directories(result.run_dir / "records");

  const WorkerFactory factory = options.factory ? *options.factory : default_worker_factory(config, taxonomy);
  const EntryRunner runner(config, taxonomy, mapping, factory, result.run_dir);

  const std::size_t n = source.entries.size();
  const std::size_t lanes_n = std::max<std::size_t>(1, std::min(config.workers, n));
  std::vector<Lane> lanes(lanes_n);
  std::vector<std::optional<CurationRecord>> records(n);
  std::vector<std::optional<CurationFailure>> failures(n);
  std::atomic<std::size_t> started{0};
  std::atomic<std::size_t> resumed{0};
  std::atomic<bool> interrupted{false};

  parallel_for(n, lanes_n, [&](std::size_t i, std::size_t lane) {
    const ManifestEntry& entry = source.entries[i];
    const auto record_path = result.run_dir / "records" / (safe_name(entry.id) + ".json");
    std::string input_key;
    try {
      input_key = sha256_hex(config.run_id() + '\n' + entry.id + '\n' + entry.dataset + '\n' +
                             sha256_file_hex(source.resolve(entry.label_ref)) + '\n' + mapping_hash);
    } catch (const Error& e) {
      failures[i] = CurationFailure{entry.id, e.kind(), e.what()};
      return;
    }
    if (auto done = load_complete_record(record_path, input_key, result.run_dir)) {
      records[i] = std::move(*done);
      ++resumed;
      return;
    }
    if (options.stop_after && started.fetch_add(1) >= *options.stop_after) {
      interrupted = true;
      return;
    }
    try {
      CurationRecord record = runner.run(source, entry, input_key, lanes[lane]);
      write_text(record_path, serialize_record(record));
      records[i] = std::move(record);
    } catch (const Error& e) {
      failures[i] = CurationFailure{entry.id, e.kind(), e.what()};
    } catch (const std::exception& e) {
      failures[i] = CurationFailure{entry.id, ErrorKind::kIo, e.what()};
    }
  });
  lanes.clear();

  result.resumed = resumed;
  result.interrupted = interrupted;
  for (auto& r : records) {
    if (r) result.records.push_back(std::move(*r));
  }
  for (auto& f : failures) {
    if (f) result.failures.push_back(std::move(*f));
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const CurationRecord& a, const CurationRecord& b) { return a.source_id < b.source_id; });
  if (result.interrupted) return result;

  DatasetManifest& curated = result.curated;
  curated.root = result.run_dir;
  curated.header.taxonomy_hash = taxonomy.hash();
  curated.header.mapping = mapping.dataset_name;
  curated.header.meta = {{"stage", "curate"},
                         {"run_id", config.run_id()},
                         {"N", std::to_string(config.candidates)},
                         {"k", std::to_string(config.select)},
                         {"tau", json(config.tau).dump()},
                         {"mode", std::string(to_string(config.mode))},
                         {"pairing", std::string(to_string(config.pairing))}};
  std::string audit;
  for (const auto& r : result.records) {
    for (std::size_t rank = 0; rank < r.selected.size(); ++rank) {
      const CuratedPair& p = r.selected[rank];
      ManifestEntry e;
      e.id = r.source_id + "#" + std::to_string(p.candidate_id);
      e.label_ref = p.label_ref;
      e.image_ref = p.image_ref;
      e.dataset = r.dataset;
      e.attrs = {{"source", r.source_id},
                 {"candidate", std::to_string(p.candidate_id)},
                 {"rank", std::to_string(rank)},
                 {"mcoc", rational_string(p.score)}};
      curated.entries.push_back(std::move(e));
    }
    for (const auto& c : r.candidates) {
      const auto it = std::find(r.ranked.begin(), r.ranked.end(), c.candidate_id);
      const bool chosen = std::any_of(r.selected.begin(), r.selected.end(),
                                      [&](const CuratedPair& p) { return p.candidate_id == c.candidate_id; });
      audit += json{{"source_id", r.source_id},
                    {"candidate", c.candidate_id},
                    {"selected", chosen},
                    {"rank", static_cast<std::size_t>(it - r.ranked.begin())},
                    {"image", c.image_ref},
                    {"label", c.label_ref},
                    {"report", json::parse(serialize_report(c.report, &taxonomy))}}
                   .dump();
      audit += '\n';
    }
  }
  write_manifest(result.run_dir / "manifest.jsonl", curated);
  write_text(result.run_dir / "audit.jsonl", audit);
  write_text(result.run_dir / "summary.json",
             summary_json(config, result.records, result.failures, n, taxonomy).dump(2) + "\n");
  write_text(result.run_dir / "config.json", config_to_json(config) + "\n");
  return result;
}

// ---------------------------------------------------------------------------
// Subsets, evaluation, conditions

DatasetManifest apply_recipe(const DatasetManifest& manifest, const std::vector<RecipeStep>& recipe,
                             const ClassTaxonomy& taxonomy, std::size_t workers) {
  DatasetManifest current = manifest;
  for (const auto& step : recipe) {
    if (step.op == "multiclass") {
      current = filter_multiclass(current, taxonomy, step.min_classes, workers);
    } else if (step.op == "stride") {
      current = stride_subset(current, step.stride, step.offset);
    } else if (step.op == "condition") {
      current = filter_condition(current, step.allowed);
    } else if (step.op == "rcs") {
      const ClassFrequencyTable table = class_frequencies(current, taxonomy, workers);
      current = rcs_sample_subset(current, table, step.rcs);
    } else {
      config_error("recipe references unknown op '" + step.op + "'");
    }
  }
  current.header.meta["recipe"] = recipe_to_json(recipe);
  return current;
}

DatasetManifest run_subset(const PipelineConfig& config, const ClassTaxonomy& taxonomy,
                           const std::filesystem::path& output) {
  config.validate();
  const DatasetManifest source = read_manifest(config.source_manifest);
  DatasetManifest subset = apply_recipe(source, config.recipe, taxonomy, config.workers);
  const auto dir = output.has_parent_path() ? output.parent_path() : std::filesystem::path(".");
  subset = rebase_manifest(std::move(subset), dir);
  write_manifest(output, subset);
  return subset;
}

IouReport run_evaluate(const DatasetManifest& predictions, const DatasetManifest& ground_truth,
                       const ClassSet& evaluated, const ClassTaxonomy& taxonomy, std::size_t workers) {
  std::map<std::string, const ManifestEntry*> pred_by_id;
  for (const auto& e : predictions.entries) pred_by_id[e.id] = &e;
  if (predictions.entries.size() != ground_truth.entries.size()) {
    throw Error(ErrorKind::kValidation, "id mismatch: " + std::to_string(predictions.entries.size()) +
                                            " predictions vs " +
                                            std::to_string(ground_truth.entries.size()) + " ground-truth entries");
  }
  std::vector<const ManifestEntry*> preds;
  for (const auto& e : ground_truth.entries) {
    auto it = pred_by_id.find(e.id);
    if (it == pred_by_id.end()) throw Error(ErrorKind::kValidation, "id mismatch: no prediction for '" + e.id + "'");
    preds.push_back(it->second);
  }

  const std::size_t lanes = std::max<std::size_t>(1, std::min(workers, ground_truth.entries.size()));
  std::vector<ConfusionMatrix> partial(lanes, ConfusionMatrix(taxonomy.size()));
  parallel_for(ground_truth.entries.size(), lanes, [&](std::size_t i, std::size_t lane) {
    const auto& gt_entry = ground_truth.entries[i];
    try {
      const SemanticMap gt = load_label_map(ground_truth.resolve(gt_entry.label_ref), taxonomy);
      const SemanticMap pred = load_label_map(predictions.resolve(preds[i]->label_ref), taxonomy);
      partial[lane].accumulate(pred, gt);
    } catch (const Error& e) {
      throw Error(e.kind(), "entry '" + gt_entry.id + "': " + e.what());
    }
  });
  ConfusionMatrix total(taxonomy.size());
  for (const auto& cm : partial) total.merge(cm);
  if (!evaluated.empty()) return iou_report(total, evaluated);
  ClassSet present;
  for (ClassId c : taxonomy.all_ids()) {
    if (total.row_sum(c) > 0) present.insert(c);
  }
  return iou_report(total, present);
}

ConditionSet run_conditions(const PipelineConfig& config, const ClassTaxonomy& taxonomy) {
  config.validate();
  const DatasetManifest source = read_manifest(config.source_manifest);
  ConditionSchedule schedule = config.schedule;
  schedule.seed = config.seed;
  return emit_condition_set(source, schedule, config.erosion, taxonomy, config.out_root / "conditions",
                            config.workers);
}

}  // namespace semcurate
