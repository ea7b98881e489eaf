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
#include "semcurate/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "semcurate/error.hpp"
#include "semcurate/hash.hpp"
#include "semcurate/parallel.hpp"
#include "semcurate/random.hpp"

namespace semcurate {
namespace {

using nlohmann::json;

struct MapStats {
  std::array<std::uint64_t, 256> counts{};
};

MapStats stats_of(const SemanticMap& map) {
  MapStats s;
  for (ClassId c : map.data()) ++s.counts[c];
  return s;
}

ClassFrequencyTable reduce(const std::vector<MapStats>& stats, std::vector<std::string> ids) {
  ClassFrequencyTable table;
  table.entry_ids = std::move(ids);
  for (std::size_t i = 0; i < stats.size(); ++i) {
    for (std::size_t c = 0; c < 256; ++c) {
      if (c == kVoidId || stats[i].counts[c] == 0) continue;
      const auto id = static_cast<ClassId>(c);
      table.pixel_counts[id] += stats[i].counts[c];
      table.total_pixels += stats[i].counts[c];
      table.occurrences[id].push_back(i);
    }
  }
  if (table.total_pixels == 0) throw Error(ErrorKind::kValidation, "no labeled pixels");
  return table;
}

void check_table_matches(const DatasetManifest& manifest, const ClassFrequencyTable& table) {
  bool ok = manifest.entries.size() == table.entry_ids.size();
  for (std::size_t i = 0; ok && i < manifest.entries.size(); ++i) {
    ok = manifest.entries[i].id == table.entry_ids[i];
  }
  if (!ok) {
    throw Error(ErrorKind::kInvalidArgument,
                "frequency table was not built from this manifest (entry ids differ)");
  }
}

struct FileFingerprint {
  std::string ref;
  std::uintmax_t size = 0;
  std::int64_t mtime = 0;
  std::string sha256;
};

FileFingerprint fingerprint(const DatasetManifest& manifest, const std::string& ref,
                            bool with_hash) {
  const auto path = manifest.resolve(ref);
  std::error_code ec;
  FileFingerprint f;
  f.ref = ref;
  f.size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot stat " + path.string());
  f.mtime = std::filesystem::last_write_time(path, ec).time_since_epoch().count();
  if (ec) throw Error(ErrorKind::kIo, "cannot stat " + path.string());
  if (with_hash) f.sha256 = sha256_file_hex(path);
  return f;
}

}  // namespace

double ClassFrequencyTable::frequency(ClassId c) const {
  auto it = pixel_counts.find(c);
  if (it == pixel_counts.end() || total_pixels == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total_pixels);
}

std::map<ClassId, double> ClassFrequencyTable::frequencies() const {
  std::map<ClassId, double> out;
  for (const auto& [c, _] : pixel_counts) out[c] = frequency(c);
  return out;
}

ClassFrequencyTable class_frequencies(const DatasetManifest& manifest,
                                      const ClassTaxonomy& taxonomy, std::size_t workers) {
  std::vector<MapStats> stats(manifest.entries.size());
  parallel_for(manifest.entries.size(), workers, [&](std::size_t i, std::size_t) {
    const auto& e = manifest.entries[i];
    try {
      stats[i] = stats_of(load_label_map(manifest.resolve(e.label_ref), taxonomy));
    } catch (const Error& err) {
      throw Error(err.kind(), "entry '" + e.id + "': " + err.what());
    }
  });
  std::vector<std::string> ids;
  ids.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) ids.push_back(e.id);
  return reduce(stats, std::move(ids));
}

ClassFrequencyTable class_frequencies(const std::vector<SemanticMap>& maps,
                                      const std::vector<std::string>& ids) {
  if (maps.size() != ids.size()) {
    throw Error(ErrorKind::kInvalidArgument, "class_frequencies: maps and ids differ in length");
  }
  std::vector<MapStats> stats;
  stats.reserve(maps.size());
  for (const auto& m : maps) stats.push_back(stats_of(m));
  return reduce(stats, ids);
}

std::string serialize_frequency_table(const ClassFrequencyTable& table) {
  json counts = json::object();
  for (const auto& [c, n] : table.pixel_counts) counts[std::to_string(c)] = n;
  json occ = json::object();
  for (const auto& [c, v] : table.occurrences) occ[std::to_string(c)] = v;
  return json{{"total_pixels", table.total_pixels},
              {"pixel_counts", counts},
              {"occurrences", occ},
              {"entry_ids", table.entry_ids}}
      .dump();
}

ClassFrequencyTable parse_frequency_table(std::string_view text) {
  try {
    const json j = json::parse(text);
    ClassFrequencyTable t;
    t.total_pixels = j.at("total_pixels").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("pixel_counts").items()) {
      t.pixel_counts[static_cast<ClassId>(std::stoi(k))] = v.get<std::uint64_t>();
    }
    for (const auto& [k, v] : j.at("occurrences").items()) {
      t.occurrences[static_cast<ClassId>(std::stoi(k))] = v.get<std::vector<std::size_t>>();
    }
    t.entry_ids = j.at("entry_ids").get<std::vector<std::string>>();
    return t;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::kParse, std::string("frequency table: ") + e.what());
  }
}

ClassFrequencyTable cached_class_frequencies(const std::filesystem::path& manifest_path,
                                             const ClassTaxonomy& taxonomy,
                                             const std::filesystem::path& cache_dir,
                                             bool verify_content, std::size_t workers,
                                             bool* cache_hit) {
  if (cache_hit) *cache_hit = false;
  const DatasetManifest manifest = read_manifest(manifest_path);
  const std::string key = sha256_file_hex(manifest_path) + "-" + taxonomy.hash();
  const auto cache_file = cache_dir / ("freq-" + key + ".json");

  std::vector<std::string> refs;
  for (const auto& e : manifest.entries) refs.push_back(e.label_ref);
  std::sort(refs.begin(), refs.end());
  refs.erase(std::unique(refs.begin(), refs.end()), refs.end());

  if (std::filesystem::exists(cache_file)) {
    try {
      auto bytes = read_file_bytes(cache_file);
      const json j = json::parse(bytes.begin(), bytes.end());
      bool valid = j.at("files").size() == refs.size();
      for (std::size_t i = 0; valid && i < refs.size(); ++i) {
        const auto& f = j.at("files")[i];
        const FileFingerprint now = fingerprint(manifest, refs[i], verify_content);
        valid = f.at("ref").get<std::string>() == now.ref &&
                f.at("size").get<std::uintmax_t>() == now.size &&
                f.at("mtime").get<std::int64_t>() == now.mtime;
        if (valid && verify_content) valid = f.value("sha256", "") == now.sha256;
      }
      if (valid) {
        if (cache_hit) *cache_hit = true;
        return parse_frequency_table(j.at("table").dump());
      }
    } catch (const std::exception&) {
      // Stale or unreadable cache: recompute below.
    }
  }

  ClassFrequencyTable table = class_frequencies(manifest, taxonomy, workers);
  json files = json::array();
  for (const auto& ref : refs) {
    const FileFingerprint f = fingerprint(manifest, ref, true);
    files.push_back({{"ref", f.ref}, {"size", f.size}, {"mtime", f.mtime}, {"sha256", f.sha256}});
  }
  const std::string text =
      json{{"manifest", key}, {"files", files}, {"table", json::parse(serialize_frequency_table(table))}}
          .dump();
  write_file_bytes(cache_file, std::span<const std::uint8_t>(
                                   reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  return table;
}

double exponential_rarity(double frequency, double temperature) {
  return (1.0 - frequency) / temperature;
}

std::map<ClassId, double> rcs_class_distribution(const ClassFrequencyTable& table,
                                                 double temperature, const RarityScore& rarity) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorKind::kInvalidArgument, "RCS temperature must be positive");
  }
  std::map<ClassId, double> logits;
  for (const auto& [c, n] : table.pixel_counts) {
    if (n > 0) logits[c] = rarity(table.frequency(c), temperature);
  }
  if (logits.empty()) throw Error(ErrorKind::kInvalidArgument, "empty frequency table");

  double max_logit = -std::numeric_limits<double>::infinity();
  for (const auto& [_, l] : logits) max_logit = std::max(max_logit, l);
  double z = 0.0;
  for (auto& [_, l] : logits) {
    l = std::exp(l - max_logit);
    z += l;
  }
  for (auto& [_, l] : logits) l /= z;
  return logits;
}

RcsClassSampler::RcsClassSampler(const ClassFrequencyTable& table, double temperature,
                                 std::uint64_t seed, const RarityScore& rarity)
    : dist_(rcs_class_distribution(table, temperature, rarity)), seed_(seed) {
  for (const auto& [c, p] : dist_) {
    classes_.push_back(c);
    weights_.push_back(p);
  }
}

ClassId RcsClassSampler::next() {
  // Counter-based so a sampler can be replayed from any position.
  const double u = counter_uniform(seed_, counter_++);
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    acc += weights_[i];
    if (u < acc) return classes_[i];
  }
  return classes_.back();
}

DatasetManifest rcs_sample_subset(const DatasetManifest& manifest, const ClassFrequencyTable& table,
                                  const RcsConfig& config, const RarityScore& rarity) {
  check_table_matches(manifest, table);
  if (config.count == 0) throw Error(ErrorKind::kInvalidArgument, "RCS count must be >= 1");
  if (!config.with_replacement && config.count > manifest.entries.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "RCS count " + std::to_string(config.count) + " exceeds pool of " +
                    std::to_string(manifest.entries.size()) + " without replacement");
  }

  const auto dist = rcs_class_distribution(table, config.temperature, rarity);
  std::vector<ClassId> classes;
  std::vector<double> weights;
  std::vector<std::vector<std::size_t>> pools;
  for (const auto& [c, p] : dist) {
    auto it = table.occurrences.find(c);
    if (it == table.occurrences.end() || it->second.empty()) continue;
    classes.push_back(c);
    weights.push_back(p);
    pools.push_back(it->second);
  }

  Rng rng(config.seed);
  DatasetManifest out;
  out.header = manifest.header;
  out.root = manifest.root;
  std::vector<bool> used(manifest.entries.size(), false);
  std::map<std::size_t, std::size_t> repeats;

  while (out.entries.size() < config.count) {
    // A class whose pool is exhausted gets weight zero, which is the same
    // as redrawing the class until one with remaining entries comes up.
    bool any = false;
    for (std::size_t k = 0; k < classes.size(); ++k) {
      if (pools[k].empty()) weights[k] = 0.0;
      any = any || weights[k] > 0.0;
    }
    if (!any) {
      throw Error(ErrorKind::kInvalidArgument,
                  "RCS exhausted all labeled entries after " + std::to_string(out.entries.size()) +
                      " draws; requested " + std::to_string(config.count));
    }
    const std::size_t k = rng.categorical(weights);
    auto& pool = pools[k];

    if (config.with_replacement) {
      const std::size_t idx = pool[rng.index(pool.size())];
      ManifestEntry e = manifest.entries[idx];
      const std::size_t n = repeats[idx]++;
      if (n > 0) e.id += "#" + std::to_string(n);
      out.entries.push_back(std::move(e));
      continue;
    }

    for (;;) {
      if (pool.empty()) break;
      const std::size_t pick = rng.index(pool.size());
      const std::size_t idx = pool[pick];
      pool[pick] = pool.back();
      pool.pop_back();
      if (used[idx]) continue;
      used[idx] = true;
      out.entries.push_back(manifest.entries[idx]);
      break;
    }
  }
  return out;
}

DatasetManifest stride_subset(const DatasetManifest& manifest, std::size_t stride,
                              std::size_t offset) {
  if (stride == 0) throw Error(ErrorKind::kInvalidArgument, "stride must be >= 1");
  DatasetManifest out;
  out.header = manifest.header;
  out.root = manifest.root;
  for (std::size_t i = offset; i < manifest.entries.size(); i += stride) {
    out.entries.push_back(manifest.entries[i]);
  }
  return out;
}

DatasetManifest filter_multiclass(const DatasetManifest& manifest, const ClassTaxonomy& taxonomy,
                                  std::size_t min_classes, std::size_t workers) {
  std::vector<char> keep(manifest.entries.size(), 0);
  parallel_for(manifest.entries.size(), workers, [&](std::size_t i, std::size_t) {
    const auto& e = manifest.entries[i];
    try {
      keep[i] = present_classes(load_label_map(manifest.resolve(e.label_ref), taxonomy)).size() >=
                min_classes;
    } catch (const Error& err) {
      throw Error(err.kind(), "entry '" + e.id + "': " + err.what());
    }
  });
  DatasetManifest out;
  out.header = manifest.header;
  out.root = manifest.root;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    if (keep[i]) out.entries.push_back(manifest.entries[i]);
  }
  return out;
}

DatasetManifest filter_condition(const DatasetManifest& manifest,
                                 const std::set<std::string>& allowed) {
  const bool wildcard = allowed.contains(kAnyCondition);
  DatasetManifest out;
  out.header = manifest.header;
  out.root = manifest.root;
  for (const auto& e : manifest.entries) {
    const bool keep = wildcard || (e.condition_tag && allowed.contains(*e.condition_tag));
    if (keep) out.entries.push_back(e);
  }
  return out;
}

}  // namespace semcurate
