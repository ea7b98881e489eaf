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

#ifndef SEMCURATE_MANIFEST_HPP_
#define SEMCURATE_MANIFEST_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace semcurate {

class ClassTaxonomy;

struct ManifestEntry {
  std::string id;
  std::string label_ref;
  std::optional<std::string> image_ref;
  std::string dataset;
  std::optional<std::string> condition_tag;
  std::optional<std::string> split;
  // Stage-specific extras (source id, candidate index, score, ...).
  std::map<std::string, std::string> attrs;

  bool operator==(const ManifestEntry&) const = default;
};

struct ManifestHeader {
  std::string taxonomy_hash;
  std::string mapping;
  std::map<std::string, std::string> meta;

  bool operator==(const ManifestHeader&) const = default;
};

// Ordered sample records persisted as JSON lines: one header line followed
// by one line per entry. Refs are relative to `root`, the directory that
// holds the manifest file.
struct DatasetManifest {
  ManifestHeader header;
  std::vector<ManifestEntry> entries;
  std::filesystem::path root;

  std::filesystem::path resolve(const std::string& ref) const { return root / ref; }

  // Throws on duplicate ids or, if given, a taxonomy hash mismatch.
  void validate(const ClassTaxonomy* taxonomy = nullptr) const;

  bool operator==(const DatasetManifest& other) const {
    return header == other.header && entries == other.entries;
  }
};

std::string serialize_manifest(const DatasetManifest& manifest);
DatasetManifest parse_manifest(std::string_view text, std::filesystem::path root = {});

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

// Copy of `manifest` with entries sorted by id.
DatasetManifest sorted_by_id(DatasetManifest manifest);

// Same entries with label/image refs rewritten relative to `new_root`
// (refs may then climb out of it with "..").
DatasetManifest rebase_manifest(DatasetManifest manifest, const std::filesystem::path& new_root);

// Path relative to `base` using forward slashes; throws if it escapes `base`.
std::string relative_ref(const std::filesystem::path& path, const std::filesystem::path& base);

// Filesystem-safe rendering of an entry id. Ids that need escaping get a
// short hash suffix so distinct ids never collide.
std::string safe_name(std::string_view id);

}  // namespace semcurate

#endif  // SEMCURATE_MANIFEST_HPP_
