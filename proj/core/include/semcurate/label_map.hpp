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

#ifndef SEMCURATE_LABEL_MAP_HPP_
#define SEMCURATE_LABEL_MAP_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace semcurate {

using ClassId = std::uint8_t;

// Reserved id. Void pixels spawn no components and enter no statistics.
inline constexpr ClassId kVoidId = 255;

class ClassTaxonomy;
class Palette;

// Rectangular row-major grid of class ids.
class SemanticMap {
 public:
  SemanticMap(int width, int height, ClassId fill = kVoidId);
  SemanticMap(int width, int height, std::vector<ClassId> classes);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return classes_.size(); }
  static constexpr ClassId void_id() noexcept { return kVoidId; }

  ClassId at(int x, int y) const { return classes_[index(x, y)]; }
  void set(int x, int y, ClassId c) { classes_[index(x, y)] = c; }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::span<const ClassId> data() const noexcept { return classes_; }
  std::span<ClassId> data() noexcept { return classes_; }

  bool same_shape(const SemanticMap& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const SemanticMap&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<ClassId> classes_;
};

// Single-channel 8-bit PNG <-> map. The validating overload rejects any
// value that is neither void nor a class of `taxonomy`, naming the first
// offending coordinate.
SemanticMap decode_label_map(std::span<const std::uint8_t> bytes,
                             const ClassTaxonomy& taxonomy);
// No value validation; used for source-dataset ids before harmonization.
SemanticMap decode_raw_label_map(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_label_map(const SemanticMap& map);

// RGB (or palette-indexed) PNG decoded through a color palette. In strict
// mode an unmapped color is an error; otherwise it becomes void.
SemanticMap decode_color_map(std::span<const std::uint8_t> bytes,
                             const Palette& palette, bool strict = true);

// File convenience wrappers.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes);
SemanticMap load_label_map(const std::filesystem::path& path,
                           const ClassTaxonomy& taxonomy);
SemanticMap load_raw_label_map(const std::filesystem::path& path);
void save_label_map(const std::filesystem::path& path, const SemanticMap& map);

// Every value is void or a class id of `taxonomy`.
bool is_valid_for(const SemanticMap& map, const ClassTaxonomy& taxonomy);

// Largest centred crop with width:height = ratio_w:ratio_h. The offset is
// floor(remainder / 2), so an odd remainder trims one more row (column) at
// the bottom (right) than at the top (left).
SemanticMap center_crop_ratio(const SemanticMap& map, int ratio_w = 2,
                              int ratio_h = 1);

struct CropWindow {
  int x0;
  int y0;
  int width;
  int height;
};
CropWindow center_crop_window(int width, int height, int ratio_w, int ratio_h);

}  // namespace semcurate

#endif  // SEMCURATE_LABEL_MAP_HPP_
