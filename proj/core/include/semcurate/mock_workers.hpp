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

#ifndef SEMCURATE_MOCK_WORKERS_HPP_
#define SEMCURATE_MOCK_WORKERS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "semcurate/label_map.hpp"
#include "semcurate/png_io.hpp"
#include "semcurate/protocol.hpp"
#include "semcurate/taxonomy.hpp"
#include "semcurate/worker.hpp"

namespace semcurate {

// Deterministic stand-ins for the image generator and the segmenter. The
// generator paints each class with its palette color plus seeded jitter and
// may repaint whole components as a different class; the repainted map is
// written next to the image as a sidecar so the mock labeller (and tests)
// know the ground truth of what was drawn.

struct RenderedSample {
  RgbImage image;
  SemanticMap effective;
};

// With probability `corruption` per 4-connected component, the component is
// redrawn as a uniformly chosen different class. Void renders black.
RenderedSample mock_generator(const SemanticMap& map, std::uint64_t seed, double corruption,
                              const ClassTaxonomy& taxonomy, int jitter = 8);

// Each pixel is independently replaced, with probability `noise_rate`, by a
// class drawn uniformly from the taxonomy.
SemanticMap mock_labeller(const SemanticMap& effective, double noise_rate, std::uint64_t seed,
                          const ClassTaxonomy& taxonomy);

// `img/a_0.png` -> `img/a_0.effective.png`
std::string sidecar_ref(const std::string& image_ref);

struct MockGeneratorOptions {
  double corruption = 0.0;
  // Per-sample override keyed by the sample's index within a request.
  std::map<std::uint32_t, double> corruption_by_index;
  int jitter = 8;
};

struct MockLabellerOptions {
  double noise_rate = 0.0;
  std::uint64_t seed = 0;
};

class MockGeneratorWorker final : public Generator {
 public:
  MockGeneratorWorker(std::filesystem::path workdir, const ClassTaxonomy& taxonomy,
                      MockGeneratorOptions options = {});

  // Sample i uses seed derive_seed(seed, "sample", i) and is written to
  // `<out_prefix>_<i>.png` plus its sidecar.
  std::vector<std::string> generate(const std::string& label_ref, std::uint64_t seed,
                                    std::uint32_t n, const std::string& out_prefix) override;

 private:
  std::filesystem::path workdir_;
  const ClassTaxonomy& taxonomy_;
  MockGeneratorOptions options_;
};

class MockLabellerWorker final : public Labeller {
 public:
  MockLabellerWorker(std::filesystem::path workdir, const ClassTaxonomy& taxonomy,
                     MockLabellerOptions options = {});

  // Noise seed is derive_seed(options.seed, image_ref, 0).
  std::string label(const std::string& image_ref, const std::string& out_ref) override;

 private:
  std::filesystem::path workdir_;
  const ClassTaxonomy& taxonomy_;
  MockLabellerOptions options_;
};

// Fault injection for protocol tests; counts are request numbers (1-based).
struct MockFaults {
  std::optional<WorkerRole> announce_role;
  std::optional<std::uint64_t> crash_at;    // exit(3) on receiving this request
  std::optional<std::uint64_t> garbage_at;  // reply with a non-JSON line
  std::optional<std::uint64_t> hang_at;     // never reply
  std::uint64_t fail_first = 0;             // error replies to the first n requests
};

struct MockServeOptions {
  WorkerRole role = WorkerRole::kGenerator;
  MockGeneratorOptions generator;
  MockLabellerOptions labeller;
  MockFaults faults;
};

// Protocol v1 request loop over `in`/`out` with the working directory
// `workdir`. Returns the process exit code (0 after quit or EOF).
int serve_mock_worker(const MockServeOptions& options, const std::filesystem::path& workdir,
                      const ClassTaxonomy& taxonomy, std::istream& in, std::ostream& out);

}  // namespace semcurate

#endif  // SEMCURATE_MOCK_WORKERS_HPP_
