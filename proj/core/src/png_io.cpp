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
#include "semcurate/png_io.hpp"

#include <png.h>

#include <cstring>
#include <string>

#include "semcurate/error.hpp"

namespace semcurate {
namespace {

struct ImageGuard {
  png_image* image;
  ~ImageGuard() { png_image_free(image); }
};

png_image begin_read(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw Error(ErrorKind::kParse, "malformed image: empty input");
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    std::string msg = std::string("malformed image: ") + image.message;
    png_image_free(&image);
    throw Error(ErrorKind::kParse, msg);
  }
  return image;
}

void finish_read(png_image& image, std::vector<std::uint8_t>& out) {
  out.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.data(), 0, nullptr)) {
    std::string msg = std::string("malformed image: ") + image.message;
    png_image_free(&image);
    throw Error(ErrorKind::kParse, msg);
  }
}

std::vector<std::uint8_t> write(png_image& image, const void* pixels) {
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(image, size, 0, pixels, 0, nullptr)) {
    throw Error(ErrorKind::kIo, std::string("png encode failed: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels, 0, nullptr)) {
    throw Error(ErrorKind::kIo, std::string("png encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

void check_dims(int width, int height, std::size_t n, std::size_t channels) {
  if (width <= 0 || height <= 0 ||
      n != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels) {
    throw Error(ErrorKind::kInvalidArgument, "png encode: inconsistent image dimensions");
  }
}

}  // namespace

GrayImage decode_png_gray(std::span<const std::uint8_t> bytes) {
  png_image image = begin_read(bytes);
  ImageGuard guard{&image};
  if (image.format != PNG_FORMAT_GRAY) {
    throw Error(ErrorKind::kParse,
                "malformed image: expected single-channel 8-bit PNG, got format " +
                    std::to_string(image.format));
  }
  GrayImage out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  finish_read(image, out.pixels);
  return out;
}

RgbImage decode_png_rgb(std::span<const std::uint8_t> bytes) {
  png_image image = begin_read(bytes);
  ImageGuard guard{&image};
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    throw Error(ErrorKind::kParse, "malformed image: 16-bit PNGs are not supported");
  }
  image.format = PNG_FORMAT_RGB;
  RgbImage out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  finish_read(image, out.pixels);
  return out;
}

std::vector<std::uint8_t> encode_png_gray(const GrayImage& img) {
  check_dims(img.width, img.height, img.pixels.size(), 1);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_GRAY;
  return write(image, img.pixels.data());
}

std::vector<std::uint8_t> encode_png_rgb(const RgbImage& img) {
  check_dims(img.width, img.height, img.pixels.size(), 3);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  return write(image, img.pixels.data());
}

}  // namespace semcurate
