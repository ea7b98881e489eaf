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
// Command line front end: curate, subset, evaluate, conditions and the
// single-map utilities (score, erode, harmonize, freq).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "semcurate/erosion.hpp"
#include "semcurate/error.hpp"
#include "semcurate/label_map.hpp"
#include "semcurate/manifest.hpp"
#include "semcurate/mcoc.hpp"
#include "semcurate/metrics.hpp"
#include "semcurate/pipeline.hpp"
#include "semcurate/sampling.hpp"
#include "semcurate/taxonomy.hpp"

namespace fs = std::filesystem;
using namespace semcurate;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;
constexpr int kExitProtocol = 4;

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out;
};

PipelineConfig base_config(const GlobalFlags& g) {
  PipelineConfig c = g.config.empty() ? PipelineConfig{} : load_config(g.config);
  if (g.seed) c.seed = *g.seed;
  if (g.workers) c.workers = *g.workers;
  if (g.out) c.out_root = *g.out;
  return c;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kConfig:
    case ErrorKind::kInvalidArgument:
      return kExitConfig;
    case ErrorKind::kProtocol:
      return kExitProtocol;
    default:
      return kExitFailure;
  }
}

ClassSet parse_class_list(const std::string& text, const ClassTaxonomy& taxonomy) {
  ClassSet out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) {
      auto id = taxonomy.find(item);
      if (!id) throw Error(ErrorKind::kConfig, "unknown class '" + item + "'");
      out.insert(*id);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Connectivity connectivity_of(int v) {
  if (v == 4) return Connectivity::kFour;
  if (v == 8) return Connectivity::kEight;
  throw Error(ErrorKind::kConfig, "connectivity must be 4 or 8");
}

}  // namespace

int main(int argc, char** argv) {
  const ClassTaxonomy taxonomy = ClassTaxonomy::urban19();

  CLI::App app{"semcurate: label-consistent curation of generated training data"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config, "pipeline config (JSON)");
  app.add_option("--seed", g.seed, "base seed");
  app.add_option("--workers", g.workers, "parallel lanes");
  app.add_option("--out", g.out, "output root");

  // curate
  auto* curate = app.add_subcommand("curate", "generate, pseudo-label, score and select candidates");
  std::string cur_manifest, cur_mapping, cur_mode, cur_pairing, cur_gen, cur_lab;
  std::optional<std::size_t> cur_n, cur_k, cur_stop;
  std::optional<double> cur_tau, cur_corruption, cur_noise;
  std::optional<int> cur_conn;
  curate->add_option("--manifest", cur_manifest, "source manifest");
  curate->add_option("--mapping", cur_mapping, "dataset id mapping file");
  curate->add_option("--N", cur_n, "candidates per source map");
  curate->add_option("--k", cur_k, "candidates kept per source map");
  curate->add_option("--tau", cur_tau, "dominance threshold");
  curate->add_option("--mode", cur_mode, "acceptance mode: literal | strict");
  curate->add_option("--connectivity", cur_conn, "4 or 8");
  curate->add_option("--pairing", cur_pairing, "label pairing: pseudo | original");
  curate->add_option("--generator", cur_gen, "generator worker command");
  curate->add_option("--labeller", cur_lab, "labeller worker command");
  curate->add_option("--mock-corruption", cur_corruption, "in-process mock generator corruption rate");
  curate->add_option("--mock-noise", cur_noise, "in-process mock labeller noise rate");
  curate->add_option("--stop-after", cur_stop, "process at most this many new entries, then stop")
      ->group("");

  // subset
  auto* subset = app.add_subcommand("subset", "apply a sampling recipe to a manifest");
  std::string sub_manifest, sub_recipe, sub_output;
  subset->add_option("--manifest", sub_manifest, "source manifest");
  subset->add_option("--recipe", sub_recipe, "recipe as a JSON array (overrides config)");
  subset->add_option("--output", sub_output, "output manifest path");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "per-class IoU of predictions against ground truth");
  std::string ev_pred, ev_gt, ev_classes, ev_method = "result";
  bool ev_json = false;
  evaluate->add_option("--pred", ev_pred, "prediction manifest")->required();
  evaluate->add_option("--gt", ev_gt, "ground-truth manifest")->required();
  evaluate->add_option("--classes", ev_classes, "evaluated classes, comma separated (default: classes in the ground truth)");
  evaluate->add_option("--method", ev_method, "row label in the table");
  evaluate->add_flag("--json", ev_json, "print the JSON report instead of the table");

  // conditions
  auto* conditions = app.add_subcommand("conditions", "materialize a condition schedule");
  std::string cond_manifest;
  conditions->add_option("--manifest", cond_manifest, "source manifest");

  // score
  auto* score = app.add_subcommand("score", "MCOC of one candidate pseudo-label against a source map");
  std::string sc_source, sc_pred, sc_mode = "literal";
  double sc_tau = 0.7;
  int sc_conn = 4;
  score->add_option("source", sc_source, "source label map (PNG)")->required();
  score->add_option("prediction", sc_pred, "pseudo-label map (PNG)")->required();
  score->add_option("--tau", sc_tau, "dominance threshold");
  score->add_option("--mode", sc_mode, "literal | strict");
  score->add_option("--connectivity", sc_conn, "4 or 8");

  // erode
  auto* erode = app.add_subcommand("erode", "component-proportional erosion of a label map");
  std::string er_in, er_out, er_radius_mode = "linear";
  double er_lambda = 0.15;
  std::optional<int> er_cap;
  bool er_no_bbox_cap = false;
  int er_conn = 4;
  erode->add_option("input", er_in)->required();
  erode->add_option("output", er_out)->required();
  erode->add_option("--lambda", er_lambda, "radius per component size unit");
  erode->add_option("--radius-mode", er_radius_mode, "linear | sqrt");
  erode->add_option("--radius-cap", er_cap, "largest radius applied");
  erode->add_flag("--no-bbox-cap", er_no_bbox_cap, "do not cap radii by half the bounding box");
  erode->add_option("--connectivity", er_conn, "4 or 8");

  // harmonize
  auto* harm = app.add_subcommand("harmonize", "remap dataset ids (or palette colors) to the taxonomy");
  std::string hm_in, hm_out, hm_mapping, hm_palette;
  bool hm_strict = false;
  harm->add_option("input", hm_in)->required();
  harm->add_option("output", hm_out)->required();
  harm->add_option("--mapping", hm_mapping, "id mapping file");
  harm->add_option("--palette", hm_palette, "palette file for color-coded input");
  harm->add_flag("--strict", hm_strict, "fail on unmapped ids or colors");

  // freq
  auto* freq = app.add_subcommand("freq", "class pixel frequencies of a manifest");
  std::string fq_manifest, fq_cache;
  bool fq_verify = false;
  double fq_temperature = 0.05;
  freq->add_option("manifest", fq_manifest)->required();
  freq->add_option("--cache-dir", fq_cache, "frequency cache directory");
  freq->add_flag("--verify", fq_verify, "hash label files when validating the cache");
  freq->add_option("--temperature", fq_temperature, "also print the sampling distribution at T");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*curate) {
      PipelineConfig c = base_config(g);
      if (!cur_manifest.empty()) c.source_manifest = cur_manifest;
      if (!cur_mapping.empty()) c.mapping_file = fs::path(cur_mapping);
      if (cur_n) c.candidates = *cur_n;
      if (cur_k) c.select = *cur_k;
      if (cur_tau) c.tau = *cur_tau;
      if (!cur_mode.empty()) c.mode = parse_acceptance_mode(cur_mode);
      if (cur_conn) c.connectivity = connectivity_of(*cur_conn);
      if (!cur_pairing.empty()) c.pairing = parse_label_pairing(cur_pairing);
      if (!cur_gen.empty()) c.generator_command = cur_gen;
      if (!cur_lab.empty()) c.labeller_command = cur_lab;
      if (cur_corruption) c.mock_generator.corruption = *cur_corruption;
      if (cur_noise) c.mock_labeller.noise_rate = *cur_noise;
      if (c.source_manifest.empty()) throw Error(ErrorKind::kConfig, "no source manifest given");
      c.validate();

      CurationOptions opts;
      opts.stop_after = cur_stop;
      const CurationResult r = run_curation(c, taxonomy, opts);
      std::cout << "run " << r.run_dir.string() << ": " << r.records.size() << " entries curated, "
                << r.curated.entries.size() << " records, " << r.resumed << " resumed, "
                << r.failures.size() << " failed\n";
      bool protocol = false;
      for (const auto& f : r.failures) {
        std::cerr << "failed " << f.source_id << " [" << to_string(f.kind) << "]: " << f.message << "\n";
        protocol = protocol || f.kind == ErrorKind::kProtocol;
      }
      if (r.interrupted) {
        std::cerr << "stopped before all entries were processed\n";
        return kExitPartial;
      }
      if (protocol) return kExitProtocol;
      return r.failures.empty() ? kExitOk : kExitPartial;
    }

    if (*subset) {
      PipelineConfig c = base_config(g);
      if (!sub_manifest.empty()) c.source_manifest = sub_manifest;
      if (!sub_recipe.empty()) c.recipe = parse_recipe(sub_recipe);
      if (c.source_manifest.empty()) throw Error(ErrorKind::kConfig, "no source manifest given");
      const fs::path output = sub_output.empty() ? c.out_root / "subset.jsonl" : fs::path(sub_output);
      const DatasetManifest m = run_subset(c, taxonomy, output);
      std::cout << output.string() << ": " << m.entries.size() << " entries\n";
      return kExitOk;
    }

    if (*evaluate) {
      const DatasetManifest pred = read_manifest(ev_pred);
      const DatasetManifest gt = read_manifest(ev_gt);
      const ClassSet evaluated = ev_classes.empty() ? ClassSet{} : parse_class_list(ev_classes, taxonomy);
      const std::size_t workers = g.workers.value_or(1);
      const IouReport report = run_evaluate(pred, gt, evaluated, taxonomy, workers);
      if (ev_json) {
        std::cout << serialize_iou_report(report, taxonomy) << "\n";
      } else {
        std::cout << format_iou_table(report, taxonomy, ev_method);
      }
      return kExitOk;
    }

    if (*conditions) {
      PipelineConfig c = base_config(g);
      if (!cond_manifest.empty()) c.source_manifest = cond_manifest;
      if (c.source_manifest.empty()) throw Error(ErrorKind::kConfig, "no source manifest given");
      const ConditionSet set = run_conditions(c, taxonomy);
      std::map<ConditionKind, std::size_t> counts;
      for (const auto& r : set.records) ++counts[r.kind];
      std::cout << (c.out_root / "conditions").string() << ": " << set.records.size() << " records";
      for (const auto& [kind, n] : counts) std::cout << ", " << to_string(kind) << " " << n;
      std::cout << "\n";
      return kExitOk;
    }

    if (*score) {
      const SemanticMap source = load_label_map(sc_source, taxonomy);
      const SemanticMap prediction = load_label_map(sc_pred, taxonomy);
      ScoreOptions opts{sc_tau, parse_acceptance_mode(sc_mode), connectivity_of(sc_conn)};
      const McocReport report = score_candidate(source, prediction, opts);
      std::cout << serialize_report(report, &taxonomy) << "\n";
      return kExitOk;
    }

    if (*erode) {
      ErosionPolicy policy;
      policy.lambda = er_lambda;
      if (er_radius_mode != "linear" && er_radius_mode != "sqrt") {
        throw Error(ErrorKind::kConfig, "radius mode must be linear or sqrt");
      }
      policy.mode = er_radius_mode == "sqrt" ? RadiusMode::kSqrt : RadiusMode::kLinear;
      policy.radius_cap = er_cap;
      policy.cap_to_bbox = !er_no_bbox_cap;
      policy.connectivity = connectivity_of(er_conn);
      try {
        policy.validate();
      } catch (const Error& e) {
        throw Error(ErrorKind::kConfig, e.what());
      }
      const SemanticMap in = load_label_map(er_in, taxonomy);
      save_label_map(er_out, erode_components(in, policy));
      return kExitOk;
    }

    if (*harm) {
      if (hm_mapping.empty() == hm_palette.empty()) {
        throw Error(ErrorKind::kConfig, "give exactly one of --mapping or --palette");
      }
      SemanticMap out(1, 1);
      if (!hm_palette.empty()) {
        const Palette palette = load_palette(hm_palette, taxonomy);
        out = decode_color_map(read_file_bytes(hm_in), palette, hm_strict);
      } else {
        const DatasetMapping mapping = load_mapping(hm_mapping, taxonomy);
        out = harmonize(load_raw_label_map(hm_in), mapping, hm_strict);
      }
      save_label_map(hm_out, out);
      return kExitOk;
    }

    if (*freq) {
      const std::size_t workers = g.workers.value_or(1);
      ClassFrequencyTable table;
      if (fq_cache.empty()) {
        table = class_frequencies(read_manifest(fq_manifest), taxonomy, workers);
      } else {
        bool hit = false;
        table = cached_class_frequencies(fq_manifest, taxonomy, fq_cache, fq_verify, workers, &hit);
        std::cerr << (hit ? "cache hit\n" : "cache miss\n");
      }
      const auto dist = rcs_class_distribution(table, fq_temperature);
      std::printf("%-14s %14s %10s %10s %10s\n", "class", "pixels", "freq", "images", "P(rcs)");
      for (const auto& [cls, count] : table.pixel_counts) {
        const auto it = dist.find(cls);
        const auto occ = table.occurrences.find(cls);
        std::printf("%-14s %14llu %10.6f %10zu %10.6f\n", taxonomy.info(cls).name.c_str(),
                    static_cast<unsigned long long>(count), table.frequency(cls),
                    occ == table.occurrences.end() ? std::size_t{0} : occ->second.size(),
                    it == dist.end() ? 0.0 : it->second);
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
