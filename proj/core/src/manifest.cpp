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
#include "semcurate/manifest.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "semcurate/error.hpp"
#include "semcurate/hash.hpp"
#include "semcurate/label_map.hpp"
#include "semcurate/taxonomy.hpp"

namespace semcurate {

using nlohmann::json;

void DatasetManifest::validate(const ClassTaxonomy* taxonomy) const {
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (e.id.empty()) throw Error(ErrorKind::kValidation, "manifest entry with empty id");
    if (!seen.insert(e.id).second) {
      throw Error(ErrorKind::kValidation, "duplicate manifest id '" + e.id + "'");
    }
  }
  if (taxonomy && !header.taxonomy_hash.empty() && header.taxonomy_hash != taxonomy->hash()) {
    throw Error(ErrorKind::kValidation, "manifest taxonomy hash " + header.taxonomy_hash +
                                            " does not match taxonomy " + taxonomy->hash());
  }
}

std::string serialize_manifest(const DatasetManifest& manifest) {
  std::string out;
  json header = {{"taxonomy_hash", manifest.header.taxonomy_hash},
                 {"mapping", manifest.header.mapping},
                 {"meta", manifest.header.meta}};
  out += json{{"header", header}}.dump();
  out += '\n';
  for (const auto& e : manifest.entries) {
    json j = {{"id", e.id}, {"label", e.label_ref}, {"dataset", e.dataset}};
    if (e.image_ref) j["image"] = *e.image_ref;
    if (e.condition_tag) j["condition"] = *e.condition_tag;
    if (e.split) j["split"] = *e.split;
    if (!e.attrs.empty()) j["attrs"] = e.attrs;
    out += j.dump();
    out += '\n';
  }
  return out;
}

DatasetManifest parse_manifest(std::string_view text, std::filesystem::path root) {
  DatasetManifest m;
  m.root = std::move(root);
  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, "manifest line " + std::to_string(lineno) + ": " + e.what());
    }
    try {
      if (j.contains("header")) {
        const auto& h = j.at("header");
        m.header.taxonomy_hash = h.value("taxonomy_hash", "");
        m.header.mapping = h.value("mapping", "");
        if (h.contains("meta")) m.header.meta = h.at("meta").get<std::map<std::string, std::string>>();
        continue;
      }
      ManifestEntry e;
      e.id = j.at("id").get<std::string>();
      e.label_ref = j.value("label", "");
      e.dataset = j.value("dataset", "");
      if (j.contains("image")) e.image_ref = j.at("image").get<std::string>();
      if (j.contains("condition")) e.condition_tag = j.at("condition").get<std::string>();
      if (j.contains("split")) e.split = j.at("split").get<std::string>();
      if (j.contains("attrs")) e.attrs = j.at("attrs").get<std::map<std::string, std::string>>();
      m.entries.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, "manifest line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  m.validate();
  return m;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  auto bytes = read_file_bytes(path);
  auto root = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  try {
    return parse_manifest(
        std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), root);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  const std::string text = serialize_manifest(manifest);
  write_file_bytes(path, std::span<const std::uint8_t>(
                             reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

DatasetManifest sorted_by_id(DatasetManifest manifest) {
  std::stable_sort(manifest.entries.begin(), manifest.entries.end(),
                   [](const ManifestEntry& a, const ManifestEntry& b) { return a.id < b.id; });
  return manifest;
}

DatasetManifest rebase_manifest(DatasetManifest manifest, const std::filesystem::path& new_root) {
  auto rebase = [&](const std::string& ref) {
    if (ref.empty()) return ref;
    return std::filesystem::absolute(manifest.resolve(ref))
        .lexically_normal()
        .lexically_relative(std::filesystem::absolute(new_root).lexically_normal())
        .generic_string();
  };
  for (auto& e : manifest.entries) {
    e.label_ref = rebase(e.label_ref);
    if (e.image_ref) e.image_ref = rebase(*e.image_ref);
  }
  manifest.root = new_root;
  return manifest;
}

std::string relative_ref(const std::filesystem::path& path, const std::filesystem::path& base) {
  auto rel = std::filesystem::absolute(path).lexically_normal().lexically_relative(
      std::filesystem::absolute(base).lexically_normal());
  auto s = rel.generic_string();
  if (rel.empty() || rel.is_absolute() || s == ".." || s.starts_with("../")) {
    throw Error(ErrorKind::kInvalidArgument,
                path.string() + " is not inside " + base.string());
  }
  return s;
}

std::string safe_name(std::string_view id) {
  std::string out;
  bool changed = id.empty();
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
    changed = changed || !ok;
  }
  if (out.starts_with(".")) {
    out[0] = '_';
    changed = true;
  }
  if (changed) out += "-" + sha256_hex(id).substr(0, 8);
  return out;
}

}  // namespace semcurate
