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
#include "semcurate/label_map.hpp"

#include <fstream>
#include <map>
#include <string>

#include "semcurate/error.hpp"
#include "semcurate/png_io.hpp"
#include "semcurate/taxonomy.hpp"

namespace semcurate {

SemanticMap::SemanticMap(int width, int height, ClassId fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "semantic map dimensions must be positive");
  }
  classes_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

SemanticMap::SemanticMap(int width, int height, std::vector<ClassId> classes)
    : width_(width), height_(height), classes_(std::move(classes)) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "semantic map dimensions must be positive");
  }
  if (classes_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorKind::kInvalidArgument, "semantic map grid length != width * height");
  }
}

SemanticMap decode_raw_label_map(std::span<const std::uint8_t> bytes) {
  GrayImage img = decode_png_gray(bytes);
  return SemanticMap(img.width, img.height, std::move(img.pixels));
}

SemanticMap decode_label_map(std::span<const std::uint8_t> bytes, const ClassTaxonomy& taxonomy) {
  SemanticMap map = decode_raw_label_map(bytes);
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const ClassId c = map.at(x, y);
      if (c != kVoidId && !taxonomy.contains(c)) {
        throw Error(ErrorKind::kValidation, "unknown class id " + std::to_string(c) + " at (" +
                                                std::to_string(x) + ", " + std::to_string(y) + ")");
      }
    }
  }
  return map;
}

std::vector<std::uint8_t> encode_label_map(const SemanticMap& map) {
  GrayImage img;
  img.width = map.width();
  img.height = map.height();
  img.pixels.assign(map.data().begin(), map.data().end());
  return encode_png_gray(img);
}

SemanticMap decode_color_map(std::span<const std::uint8_t> bytes, const Palette& palette,
                             bool strict) {
  RgbImage img = decode_png_rgb(bytes);
  SemanticMap map(img.width, img.height);
  std::map<std::uint32_t, std::size_t> unknown;
  auto out = map.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Rgb c{img.pixels[3 * i], img.pixels[3 * i + 1], img.pixels[3 * i + 2]};
    if (auto id = palette.lookup(c)) {
      out[i] = *id;
    } else {
      ++unknown[(std::uint32_t{c[0]} << 16) | (std::uint32_t{c[1]} << 8) | c[2]];
      out[i] = kVoidId;
    }
  }
  if (strict && !unknown.empty()) {
    std::string detail;
    for (const auto& [packed, count] : unknown) {
      if (!detail.empty()) detail += ", ";
      detail += "(" + std::to_string(packed >> 16) + "," + std::to_string((packed >> 8) & 0xFF) +
                "," + std::to_string(packed & 0xFF) + ") x" + std::to_string(count);
    }
    throw Error(ErrorKind::kValidation, "unmapped colors: " + detail);
  }
  return map;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), size)) {
    throw Error(ErrorKind::kIo, "read failed: " + path.string());
  }
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Write-then-rename so readers never observe a torn file.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::kIo, "write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

SemanticMap load_label_map(const std::filesystem::path& path, const ClassTaxonomy& taxonomy) {
  auto bytes = read_file_bytes(path);
  try {
    return decode_label_map(bytes, taxonomy);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

SemanticMap load_raw_label_map(const std::filesystem::path& path) {
  auto bytes = read_file_bytes(path);
  try {
    return decode_raw_label_map(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void save_label_map(const std::filesystem::path& path, const SemanticMap& map) {
  write_file_bytes(path, encode_label_map(map));
}

bool is_valid_for(const SemanticMap& map, const ClassTaxonomy& taxonomy) {
  for (ClassId c : map.data()) {
    if (c != kVoidId && !taxonomy.contains(c)) return false;
  }
  return true;
}

CropWindow center_crop_window(int width, int height, int ratio_w, int ratio_h) {
  if (ratio_w <= 0 || ratio_h <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "crop ratio must be positive");
  }
  if (width < ratio_w || height < ratio_h) {
    throw Error(ErrorKind::kInvalidArgument,
                "map " + std::to_string(width) + "x" + std::to_string(height) +
                    " is smaller than the crop ratio " + std::to_string(ratio_w) + "x" +
                    std::to_string(ratio_h));
  }
  const int scale = std::min(width / ratio_w, height / ratio_h);
  CropWindow w;
  w.width = scale * ratio_w;
  w.height = scale * ratio_h;
  w.x0 = (width - w.width) / 2;
  w.y0 = (height - w.height) / 2;
  return w;
}

SemanticMap center_crop_ratio(const SemanticMap& map, int ratio_w, int ratio_h) {
  const CropWindow w = center_crop_window(map.width(), map.height(), ratio_w, ratio_h);
  if (w.width == map.width() && w.height == map.height()) return map;
  SemanticMap out(w.width, w.height);
  for (int y = 0; y < w.height; ++y) {
    for (int x = 0; x < w.width; ++x) out.set(x, y, map.at(w.x0 + x, w.y0 + y));
  }
  return out;
}

}  // namespace semcurate
