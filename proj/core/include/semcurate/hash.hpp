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

#ifndef SEMCURATE_HASH_HPP_
#define SEMCURATE_HASH_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace semcurate {

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);
std::string sha256_file_hex(const std::filesystem::path& path);

// Stable 64-bit seed from (base seed, key, index). Independent of platform
// and of the position of `key` in any container.
std::uint64_t derive_seed(std::uint64_t base, std::string_view key,
                          std::uint64_t index);

}  // namespace semcurate

#endif  // SEMCURATE_HASH_HPP_
