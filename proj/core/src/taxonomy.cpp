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
#include "semcurate/taxonomy.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <sstream>

#include "semcurate/error.hpp"
#include "semcurate/hash.hpp"

namespace semcurate {
namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

std::string_view strip_comment(std::string_view line) {
  auto hash = line.find('#');
  return trim(hash == std::string_view::npos ? line : line.substr(0, hash));
}

std::optional<long> parse_int(std::string_view s) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string line_ctx(std::size_t lineno) { return "line " + std::to_string(lineno) + ": "; }

// "void", a class name, or a numeric id.
ClassId parse_target(std::string_view token, const ClassTaxonomy& taxonomy,
                     std::size_t lineno) {
  if (token == "void") return kVoidId;
  if (auto id = parse_int(token)) {
    if (*id == kVoidId) return kVoidId;
    if (*id < 0 || *id > 254 || !taxonomy.contains(static_cast<ClassId>(*id))) {
      throw Error(ErrorKind::kValidation,
                  line_ctx(lineno) + "target id " + std::to_string(*id) + " outside taxonomy");
    }
    return static_cast<ClassId>(*id);
  }
  if (auto id = taxonomy.find(token)) return *id;
  throw Error(ErrorKind::kValidation,
              line_ctx(lineno) + "unknown class name '" + std::string(token) + "'");
}

std::uint32_t pack(Rgb c) {
  return (static_cast<std::uint32_t>(c[0]) << 16) | (static_cast<std::uint32_t>(c[1]) << 8) | c[2];
}

}  // namespace

ClassTaxonomy::ClassTaxonomy(std::vector<ClassInfo> classes) : classes_(std::move(classes)) {
  if (classes_.empty()) throw Error(ErrorKind::kValidation, "taxonomy has no classes");
  if (classes_.size() > kVoidId) {
    throw Error(ErrorKind::kValidation, "taxonomy has too many classes");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].id != i) {
      throw Error(ErrorKind::kValidation, "taxonomy ids must be dense from 0");
    }
    if (classes_[i].name.empty() || !names.insert(classes_[i].name).second) {
      throw Error(ErrorKind::kValidation, "duplicate or empty class name '" + classes_[i].name + "'");
    }
  }
}

const ClassTaxonomy& ClassTaxonomy::urban19() {
  static const ClassTaxonomy taxonomy({
      {0, "road", "Rd", true, {128, 64, 128}},
      {1, "sidewalk", "Sdwk", true, {244, 35, 232}},
      {2, "building", "Bldg", true, {70, 70, 70}},
      {3, "wall", "Wall", true, {102, 102, 156}},
      {4, "fence", "Fnc", true, {190, 153, 153}},
      {5, "pole", "Pole", true, {153, 153, 153}},
      {6, "traffic light", "TLgt", true, {250, 170, 30}},
      {7, "traffic sign", "TSign", true, {220, 220, 0}},
      {8, "vegetation", "Veg", true, {107, 142, 35}},
      {9, "terrain", "Terr", true, {152, 251, 152}},
      {10, "sky", "Sky", true, {70, 130, 180}},
      {11, "person", "Pers", true, {220, 20, 60}},
      {12, "rider", "Rdr", true, {255, 0, 0}},
      {13, "car", "Car", true, {0, 0, 142}},
      {14, "truck", "Trck", true, {0, 0, 70}},
      {15, "bus", "Bus", true, {0, 60, 100}},
      {16, "train", "Train", true, {0, 80, 100}},
      {17, "motorcycle", "Mcy", true, {0, 0, 230}},
      {18, "bicycle", "Bike", true, {119, 11, 32}},
  });
  return taxonomy;
}

const ClassInfo& ClassTaxonomy::info(ClassId id) const {
  if (!contains(id)) {
    throw Error(ErrorKind::kInvalidArgument, "unknown class id " + std::to_string(id));
  }
  return classes_[id];
}

std::optional<ClassId> ClassTaxonomy::find(std::string_view name) const {
  for (const auto& c : classes_) {
    if (c.name == name || c.short_name == name) return c.id;
  }
  return std::nullopt;
}

ClassSet ClassTaxonomy::all_ids() const {
  ClassSet ids;
  for (const auto& c : classes_) ids.insert(c.id);
  return ids;
}

std::string ClassTaxonomy::hash() const {
  std::ostringstream os;
  os << "void=" << static_cast<int>(kVoidId) << '\n';
  for (const auto& c : classes_) os << static_cast<int>(c.id) << '\t' << c.name << '\n';
  return sha256_hex(os.str()).substr(0, 16);
}

Palette Palette::from_taxonomy(const ClassTaxonomy& taxonomy) {
  Palette p;
  for (const auto& c : taxonomy.classes()) p.add(c.color, c.id);
  return p;
}

void Palette::add(Rgb color, ClassId id) {
  auto [it, inserted] = table_.emplace(pack(color), id);
  if (!inserted && it->second != id) {
    throw Error(ErrorKind::kValidation, "palette color (" + std::to_string(color[0]) + "," +
                                            std::to_string(color[1]) + "," +
                                            std::to_string(color[2]) + ") mapped twice");
  }
}

std::optional<ClassId> Palette::lookup(Rgb color) const {
  auto it = table_.find(pack(color));
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

Palette parse_palette(std::string_view text, const ClassTaxonomy& taxonomy) {
  Palette palette;
  std::size_t lineno = 0;
  for (auto raw : split_lines(text)) {
    ++lineno;
    auto line = strip_comment(raw);
    if (line.empty()) continue;
    auto arrow = line.find("->");
    if (arrow == std::string_view::npos) {
      throw Error(ErrorKind::kParse, line_ctx(lineno) + "expected '<r> <g> <b> -> <class>'");
    }
    std::istringstream lhs{std::string(trim(line.substr(0, arrow)))};
    int r = -1, g = -1, b = -1;
    std::string extra;
    if (!(lhs >> r >> g >> b) || (lhs >> extra) || r < 0 || r > 255 || g < 0 || g > 255 ||
        b < 0 || b > 255) {
      throw Error(ErrorKind::kParse, line_ctx(lineno) + "bad color triple");
    }
    ClassId target = parse_target(trim(line.substr(arrow + 2)), taxonomy, lineno);
    palette.add({static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                 static_cast<std::uint8_t>(b)},
                target);
  }
  return palette;
}

Palette load_palette(const std::filesystem::path& path, const ClassTaxonomy& taxonomy) {
  auto bytes = read_file_bytes(path);
  return parse_palette(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                       taxonomy);
}

DatasetMapping DatasetMapping::identity(const ClassTaxonomy& taxonomy, std::string name) {
  DatasetMapping m;
  m.dataset_name = std::move(name);
  for (const auto& c : taxonomy.classes()) {
    m.entries.emplace(c.id, c.id);
    m.declared_present.insert(c.id);
  }
  return m;
}

DatasetMapping parse_mapping(std::string_view text, const ClassTaxonomy& taxonomy) {
  DatasetMapping mapping;
  std::optional<ClassSet> present;
  std::size_t lineno = 0;
  for (auto raw : split_lines(text)) {
    ++lineno;
    auto line = strip_comment(raw);
    if (line.empty()) continue;

    if (line.starts_with("dataset:")) {
      mapping.dataset_name = std::string(trim(line.substr(8)));
      continue;
    }
    if (line.starts_with("present:")) {
      ClassSet ids;
      auto rest = line.substr(8);
      std::size_t pos = 0;
      while (pos <= rest.size()) {
        auto comma = rest.find(',', pos);
        if (comma == std::string_view::npos) comma = rest.size();
        auto tok = trim(rest.substr(pos, comma - pos));
        if (!tok.empty()) {
          ClassId id = parse_target(tok, taxonomy, lineno);
          if (id == kVoidId) {
            throw Error(ErrorKind::kValidation, line_ctx(lineno) + "void cannot be declared present");
          }
          ids.insert(id);
        }
        pos = comma + 1;
      }
      present = std::move(ids);
      continue;
    }

    auto arrow = line.find("->");
    if (arrow == std::string_view::npos) {
      throw Error(ErrorKind::kParse, line_ctx(lineno) + "expected '<id> -> <class>'");
    }
    auto src = parse_int(trim(line.substr(0, arrow)));
    if (!src || *src < 0 || *src > 255) {
      throw Error(ErrorKind::kParse, line_ctx(lineno) + "source id must be an integer in 0..255");
    }
    ClassId target = parse_target(trim(line.substr(arrow + 2)), taxonomy, lineno);
    if (!mapping.entries.emplace(static_cast<int>(*src), target).second) {
      throw Error(ErrorKind::kValidation,
                  line_ctx(lineno) + "source id " + std::to_string(*src) + " mapped twice");
    }
  }

  if (present) {
    mapping.declared_present = std::move(*present);
  } else {
    for (const auto& [src, dst] : mapping.entries) {
      if (dst != kVoidId) mapping.declared_present.insert(dst);
    }
  }
  return mapping;
}

DatasetMapping load_mapping(const std::filesystem::path& path, const ClassTaxonomy& taxonomy) {
  auto bytes = read_file_bytes(path);
  auto mapping = parse_mapping(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), taxonomy);
  if (mapping.dataset_name.empty()) mapping.dataset_name = path.stem().string();
  return mapping;
}

std::string format_mapping(const DatasetMapping& mapping, const ClassTaxonomy& taxonomy) {
  std::ostringstream os;
  if (!mapping.dataset_name.empty()) os << "dataset: " << mapping.dataset_name << '\n';
  os << "present: ";
  bool first = true;
  for (ClassId id : mapping.declared_present) {
    os << (first ? "" : ",") << taxonomy.info(id).name;
    first = false;
  }
  os << '\n';
  for (const auto& [src, dst] : mapping.entries) {
    os << src << " -> " << (dst == kVoidId ? std::string("void") : taxonomy.info(dst).name) << '\n';
  }
  return os.str();
}

DatasetMapping compose(const DatasetMapping& outer, const DatasetMapping& inner) {
  DatasetMapping out;
  out.dataset_name = inner.dataset_name;
  for (const auto& [src, mid] : inner.entries) {
    if (mid == kVoidId) {
      out.entries.emplace(src, kVoidId);
      continue;
    }
    auto it = outer.entries.find(mid);
    if (it != outer.entries.end()) out.entries.emplace(src, it->second);
  }
  for (const auto& [src, dst] : out.entries) {
    if (dst != kVoidId) out.declared_present.insert(dst);
  }
  return out;
}

SemanticMap harmonize(const SemanticMap& map, const DatasetMapping& mapping, bool strict) {
  std::array<int, 256> lut;
  lut.fill(-1);
  for (const auto& [src, dst] : mapping.entries) lut[static_cast<std::size_t>(src)] = dst;
  lut[kVoidId] = kVoidId;

  std::array<std::size_t, 256> unmapped{};
  SemanticMap out(map.width(), map.height());
  auto src = map.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const int t = lut[src[i]];
    if (t < 0) {
      ++unmapped[src[i]];
      dst[i] = kVoidId;
    } else {
      dst[i] = static_cast<ClassId>(t);
    }
  }

  if (strict) {
    std::string detail;
    for (std::size_t id = 0; id < unmapped.size(); ++id) {
      if (unmapped[id] == 0) continue;
      if (!detail.empty()) detail += ", ";
      detail += "id " + std::to_string(id) + " (" + std::to_string(unmapped[id]) + " px)";
    }
    if (!detail.empty()) {
      throw Error(ErrorKind::kValidation,
                  "unmapped source ids in dataset '" + mapping.dataset_name + "': " + detail);
    }
  }
  return out;
}

ClassSet present_classes(const SemanticMap& map) {
  std::array<bool, 256> seen{};
  for (ClassId c : map.data()) seen[c] = true;
  ClassSet out;
  for (std::size_t id = 0; id < seen.size(); ++id) {
    if (seen[id] && id != kVoidId) out.insert(static_cast<ClassId>(id));
  }
  return out;
}

}  // namespace semcurate
