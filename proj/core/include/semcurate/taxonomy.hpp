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

#ifndef SEMCURATE_TAXONOMY_HPP_
#define SEMCURATE_TAXONOMY_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "semcurate/label_map.hpp"

namespace semcurate {

using ClassSet = std::set<ClassId>;
using Rgb = std::array<std::uint8_t, 3>;

struct ClassInfo {
  ClassId id;
  std::string name;        // canonical, e.g. "traffic light"
  std::string short_name;  // table column header, e.g. "TLgt"
  bool evaluable = true;
  Rgb color{};
};

// Canonical class list: ids dense from 0, unique names, void excluded.
class ClassTaxonomy {
 public:
  explicit ClassTaxonomy(std::vector<ClassInfo> classes);

  // The 19 evaluable urban classes, ids 0..18 in the usual table order.
  static const ClassTaxonomy& urban19();

  std::size_t size() const noexcept { return classes_.size(); }
  const std::vector<ClassInfo>& classes() const noexcept { return classes_; }
  const ClassInfo& info(ClassId id) const;
  bool contains(ClassId id) const noexcept { return id < classes_.size(); }
  static constexpr ClassId void_id() noexcept { return kVoidId; }

  // Name lookup; also accepts short names. Case-sensitive.
  std::optional<ClassId> find(std::string_view name) const;

  ClassSet all_ids() const;

  // Short stable fingerprint of ids, names and void id.
  std::string hash() const;

 private:
  std::vector<ClassInfo> classes_;
};

// Packed-RGB to class association used for color-coded label files.
class Palette {
 public:
  Palette() = default;
  // Colors of the taxonomy's classes.
  static Palette from_taxonomy(const ClassTaxonomy& taxonomy);

  void add(Rgb color, ClassId id);
  std::optional<ClassId> lookup(Rgb color) const;
  std::size_t size() const noexcept { return table_.size(); }

 private:
  std::map<std::uint32_t, ClassId> table_;
};

// Palette file: `#` comments, lines `<r> <g> <b> -> <class-name|void>`.
Palette load_palette(const std::filesystem::path& path, const ClassTaxonomy& taxonomy);
Palette parse_palette(std::string_view text, const ClassTaxonomy& taxonomy);

// Source-dataset id -> canonical id (or void).
struct DatasetMapping {
  std::string dataset_name;
  std::map<int, ClassId> entries;
  ClassSet declared_present;

  static DatasetMapping identity(const ClassTaxonomy& taxonomy,
                                 std::string name = "identity");
};

// Mapping file: UTF-8, `#` comments, optional `dataset: <name>` and
// `present: <name,...>` headers, then `<int> -> <class-name|id|void>` lines.
// Without a `present:` header, declared_present is the image of the entries.
DatasetMapping parse_mapping(std::string_view text, const ClassTaxonomy& taxonomy);
DatasetMapping load_mapping(const std::filesystem::path& path,
                            const ClassTaxonomy& taxonomy);
std::string format_mapping(const DatasetMapping& mapping, const ClassTaxonomy& taxonomy);

// outer ∘ inner: inner's targets are looked up in outer. Void stays void.
DatasetMapping compose(const DatasetMapping& outer, const DatasetMapping& inner);

// Remaps every pixel. Void (255) in the source is always preserved. An id
// without an entry is an error in strict mode (all such ids and their pixel
// counts are reported) and void otherwise.
SemanticMap harmonize(const SemanticMap& map, const DatasetMapping& mapping,
                      bool strict = true);

// Non-void ids occurring in the map.
ClassSet present_classes(const SemanticMap& map);

}  // namespace semcurate

#endif  // SEMCURATE_TAXONOMY_HPP_
