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
#ifndef SEMCURATE_TESTS_TEST_SUPPORT_HPP_
#define SEMCURATE_TESTS_TEST_SUPPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "semcurate/label_map.hpp"
#include "semcurate/manifest.hpp"
#include "semcurate/random.hpp"

namespace semcurate::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

// i.i.d. pixels over classes [0, num_classes), void with probability p_void.
SemanticMap random_map(Rng& rng, int width, int height, int num_classes, double p_void = 0.0);

// Overlapping random rectangles on a void canvas: larger components with
// irregular outlines, which exercise erosion and scoring better than noise.
SemanticMap random_blocky_map(Rng& rng, int width, int height, int num_classes,
                              int rectangles = 12);

// Street-like layout (sky, buildings, road, sidewalk, vehicles, people,
// poles) with seeded variation. Uses urban taxonomy ids.
SemanticMap street_map(std::uint64_t seed, int width = 128, int height = 64);

// Saves maps as `<dir>/labels/<id>.png` and writes `<dir>/manifest.jsonl`.
std::filesystem::path write_map_manifest(const std::filesystem::path& dir,
                                         const std::vector<SemanticMap>& maps,
                                         const std::vector<std::string>& ids,
                                         const std::string& dataset = "synthetic");

// Runs argv[0] with the given arguments, stdout and stderr redirected to
// files when non-empty. Returns the exit status, or 128 + signal.
int run_process(const std::vector<std::string>& argv, const std::filesystem::path& stdout_path = {},
                const std::filesystem::path& stderr_path = {});

std::string read_text(const std::filesystem::path& path);

// Paths of the built executables, injected by the build.
std::filesystem::path cli_path();
std::filesystem::path mock_worker_path();

}  // namespace semcurate::testing

#endif  // SEMCURATE_TESTS_TEST_SUPPORT_HPP_
