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
#include "semcurate/conditions.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "semcurate/error.hpp"
#include "semcurate/parallel.hpp"
#include "semcurate/random.hpp"
#include "semcurate/taxonomy.hpp"

namespace semcurate {
namespace {

using nlohmann::json;

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

// Ref from `base` to `path`; may climb out of `base` for source labels.
std::string ref_from(const std::filesystem::path& path, const std::filesystem::path& base) {
  return std::filesystem::absolute(path)
      .lexically_normal()
      .lexically_relative(std::filesystem::absolute(base).lexically_normal())
      .generic_string();
}

}  // namespace

std::string_view to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::kFull: return "full";
    case ConditionKind::kCoarse: return "coarse";
    case ConditionKind::kDepth: return "depth";
    case ConditionKind::kBlack: return "black";
  }
  return "full";
}

ConditionKind parse_condition_kind(std::string_view text) {
  if (text == "full") return ConditionKind::kFull;
  if (text == "coarse") return ConditionKind::kCoarse;
  if (text == "depth") return ConditionKind::kDepth;
  if (text == "black") return ConditionKind::kBlack;
  throw Error(ErrorKind::kParse, "unknown condition kind '" + std::string(text) + "'");
}

void ConditionSchedule::validate() const {
  if (!is_probability(p_depth) || !is_probability(p_black) || !is_probability(p_coarse)) {
    throw Error(ErrorKind::kInvalidArgument, "condition probabilities must lie in [0, 1]");
  }
  if (p_depth + p_black + p_coarse > 1.0 + 1e-12) {
    throw Error(ErrorKind::kInvalidArgument, "condition probabilities sum to more than 1");
  }
}

ConditionKind sample_condition(const ConditionSchedule& schedule, std::uint64_t step) {
  const double u = counter_uniform(schedule.seed, step);
  double edge = schedule.p_depth;
  if (u < edge) return ConditionKind::kDepth;
  edge += schedule.p_black;
  if (u < edge) return ConditionKind::kBlack;
  edge += schedule.p_coarse;
  if (u < edge) return ConditionKind::kCoarse;
  return ConditionKind::kFull;
}

std::string serialize_condition_record(const ConditionRecord& r) {
  json j = {{"step", r.step}, {"id", r.entry_id}, {"kind", std::string(to_string(r.kind))}};
  if (r.label_ref) j["label_ref"] = *r.label_ref;
  if (r.eroded_ref) j["eroded_ref"] = *r.eroded_ref;
  if (r.depth_ref) j["depth_ref"] = *r.depth_ref;
  return j.dump();
}

ConditionRecord parse_condition_record(std::string_view line) {
  try {
    const json j = json::parse(line);
    ConditionRecord r;
    r.step = j.at("step").get<std::uint64_t>();
    r.entry_id = j.at("id").get<std::string>();
    r.kind = parse_condition_kind(j.at("kind").get<std::string>());
    if (j.contains("label_ref")) r.label_ref = j.at("label_ref").get<std::string>();
    if (j.contains("eroded_ref")) r.eroded_ref = j.at("eroded_ref").get<std::string>();
    if (j.contains("depth_ref")) r.depth_ref = j.at("depth_ref").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("condition record: ") + e.what());
  }
}

ConditionSet emit_condition_set(const DatasetManifest& manifest, const ConditionSchedule& schedule,
                                const ErosionPolicy& policy, const ClassTaxonomy& taxonomy,
                                const std::filesystem::path& out_dir, std::size_t workers) {
  schedule.validate();
  policy.validate();
  manifest.validate(&taxonomy);
  std::filesystem::create_directories(out_dir);

  std::vector<ConditionRecord> records(manifest.entries.size());
  parallel_for(manifest.entries.size(), workers, [&](std::size_t i, std::size_t) {
    const ManifestEntry& entry = manifest.entries[i];
    ConditionRecord r;
    r.step = i;
    r.entry_id = entry.id;
    r.kind = sample_condition(schedule, i);

    const auto label_path = manifest.resolve(entry.label_ref);
    if (!std::filesystem::exists(label_path)) {
      throw Error(ErrorKind::kIo,
                  "entry '" + entry.id + "': missing label file " + label_path.string());
    }
    switch (r.kind) {
      case ConditionKind::kFull:
        r.label_ref = ref_from(label_path, out_dir);
        break;
      case ConditionKind::kCoarse: {
        r.label_ref = ref_from(label_path, out_dir);
        const SemanticMap eroded = erode_components(load_label_map(label_path, taxonomy), policy);
        const std::string ref = "eroded/" + safe_name(entry.id) + ".png";
        save_label_map(out_dir / ref, eroded);
        r.eroded_ref = ref;
        break;
      }
      case ConditionKind::kDepth:
        r.depth_ref = "depth/" + safe_name(entry.id) + ".png";
        break;
      case ConditionKind::kBlack:
        break;
    }
    records[i] = std::move(r);
  });

  std::sort(records.begin(), records.end(),
            [](const ConditionRecord& a, const ConditionRecord& b) { return a.entry_id < b.entry_id; });

  ConditionSet set;
  set.manifest.root = out_dir;
  set.manifest.header = manifest.header;
  set.manifest.header.meta["stage"] = "conditions";
  set.manifest.header.meta["schedule"] =
      json{{"p_depth", schedule.p_depth}, {"p_black", schedule.p_black},
           {"p_coarse", schedule.p_coarse}, {"seed", schedule.seed}}
          .dump();
  std::string lines;
  for (const auto& r : records) {
    lines += serialize_condition_record(r);
    lines += '\n';
    const ManifestEntry& src = manifest.entries[r.step];
    ManifestEntry e;
    e.id = r.entry_id;
    e.dataset = src.dataset;
    e.condition_tag = src.condition_tag;
    e.split = src.split;
    if (src.image_ref) e.image_ref = ref_from(manifest.resolve(*src.image_ref), out_dir);
    e.label_ref = r.eroded_ref ? *r.eroded_ref : r.label_ref.value_or("");
    e.attrs["step"] = std::to_string(r.step);
    e.attrs["kind"] = std::string(to_string(r.kind));
    if (r.depth_ref) e.attrs["depth_ref"] = *r.depth_ref;
    set.manifest.entries.push_back(std::move(e));
  }
  write_file_bytes(out_dir / "conditions.jsonl",
                   std::span<const std::uint8_t>(
                       reinterpret_cast<const std::uint8_t*>(lines.data()), lines.size()));
  write_manifest(out_dir / "manifest.jsonl", set.manifest);
  set.records = std::move(records);
  return set;
}

}  // namespace semcurate
