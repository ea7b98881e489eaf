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

#ifndef SEMCURATE_PNG_IO_HPP_
#define SEMCURATE_PNG_IO_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace semcurate {

// Thin wrappers over libpng's simplified API.

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // interleaved RGB
};

// Accepts only 8-bit single-channel PNGs (no palette, no alpha).
GrayImage decode_png_gray(std::span<const std::uint8_t> bytes);
// Any 8-bit PNG; converted to RGB.
RgbImage decode_png_rgb(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_png_gray(const GrayImage& image);
std::vector<std::uint8_t> encode_png_rgb(const RgbImage& image);

}  // namespace semcurate

#endif  // SEMCURATE_PNG_IO_HPP_
