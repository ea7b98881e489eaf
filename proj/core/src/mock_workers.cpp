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
#include "semcurate/mock_workers.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <thread>

#include "semcurate/components.hpp"
#include "semcurate/error.hpp"
#include "semcurate/hash.hpp"
#include "semcurate/random.hpp"

namespace semcurate {
namespace {

std::filesystem::path confined(const std::filesystem::path& workdir, const std::string& ref) {
  if (!is_confined_ref(ref)) {
    throw Error(ErrorKind::kInvalidArgument, "ref escapes the workdir: " + ref);
  }
  return workdir / ref;
}


}  // namespace

RenderedSample mock_generator(const SemanticMap& map, std::uint64_t seed, double corruption,
                              const ClassTaxonomy& taxonomy, int jitter) {
  Rng rng(seed);
  SemanticMap effective = map;
  if (corruption > 0.0 && taxonomy.size() > 1) {
    const ComponentSet comps = connected_components(map, Connectivity::kFour);
    for (const Component& comp : comps.components()) {
      if (!rng.bernoulli(corruption)) continue;
      const auto k = static_cast<std::uint64_t>(taxonomy.size());
      auto swapped = static_cast<ClassId>((comp.class_id + 1 + rng.index(k - 1)) % k);
      for (const Pixel& p : comp.pixels) effective.set(p.x, p.y, swapped);
    }
  }

  RgbImage image;
  image.width = map.width();
  image.height = map.height();
  image.pixels.resize(map.size() * 3);
  const auto cells = effective.data();
  const auto span = static_cast<std::uint64_t>(2 * std::max(0, jitter) + 1);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Rgb base = cells[i] == kVoidId || !taxonomy.contains(cells[i])
                         ? Rgb{0, 0, 0}
                         : taxonomy.info(cells[i]).color;
    for (std::size_t ch = 0; ch < 3; ++ch) {
      const int noise = static_cast<int>(rng.index(span)) - std::max(0, jitter);
      image.pixels[3 * i + ch] = static_cast<std::uint8_t>(std::clamp(base[ch] + noise, 0, 255));
    }
  }
  return {std::move(image), std::move(effective)};
}

SemanticMap mock_labeller(const SemanticMap& effective, double noise_rate, std::uint64_t seed,
                          const ClassTaxonomy& taxonomy) {
  SemanticMap out = effective;
  if (noise_rate <= 0.0) return out;
  Rng rng(seed);
  for (ClassId& c : out.data()) {
    if (rng.bernoulli(noise_rate)) c = static_cast<ClassId>(rng.index(taxonomy.size()));
  }
  return out;
}

std::string sidecar_ref(const std::string& image_ref) {
  std::string stem = image_ref;
  if (stem.size() >= 4 && stem.compare(stem.size() - 4, 4, ".png") == 0) stem.resize(stem.size() - 4);
  return stem + ".effective.png";
}

MockGeneratorWorker::MockGeneratorWorker(std::filesystem::path workdir,
                                         const ClassTaxonomy& taxonomy,
                                         MockGeneratorOptions options)
    : workdir_(std::move(workdir)), taxonomy_(taxonomy), options_(std::move(options)) {}

std::vector<std::string> MockGeneratorWorker::generate(const std::string& label_ref,
                                                       std::uint64_t seed, std::uint32_t n,
                                                       const std::string& out_prefix) {
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "generate: n must be >= 1");
  const SemanticMap source = load_label_map(confined(workdir_, label_ref), taxonomy_);
  std::vector<std::string> refs;
  for (std::uint32_t i = 0; i < n; ++i) {
    auto it = options_.corruption_by_index.find(i);
    const double corruption = it != options_.corruption_by_index.end() ? it->second : options_.corruption;
    const RenderedSample s =
        mock_generator(source, derive_seed(seed, "sample", i), corruption, taxonomy_, options_.jitter);
    const std::string ref = out_prefix + "_" + std::to_string(i) + ".png";
    write_file_bytes(confined(workdir_, ref), encode_png_rgb(s.image));
    save_label_map(confined(workdir_, sidecar_ref(ref)), s.effective);
    refs.push_back(ref);
  }
  return refs;
}

MockLabellerWorker::MockLabellerWorker(std::filesystem::path workdir, const ClassTaxonomy& taxonomy,
                                       MockLabellerOptions options)
    : workdir_(std::move(workdir)), taxonomy_(taxonomy), options_(options) {}

std::string MockLabellerWorker::label(const std::string& image_ref, const std::string& out_ref) {
  const auto image_path = confined(workdir_, image_ref);
  const auto sidecar = confined(workdir_, sidecar_ref(image_ref));
  if (!std::filesystem::exists(sidecar)) {
    throw Error(ErrorKind::kWorker, "missing sidecar for " + image_ref);
  }
  const RgbImage image = decode_png_rgb(read_file_bytes(image_path));
  const SemanticMap effective = load_label_map(sidecar, taxonomy_);
  if (effective.width() != image.width || effective.height() != image.height) {
    throw Error(ErrorKind::kWorker, "sidecar dimensions differ from " + image_ref);
  }
  const SemanticMap labels =
      mock_labeller(effective, options_.noise_rate, derive_seed(options_.seed, image_ref, 0), taxonomy_);
  save_label_map(confined(workdir_, out_ref), labels);
  return out_ref;
}

int serve_mock_worker(const MockServeOptions& options, const std::filesystem::path& workdir,
                      const ClassTaxonomy& taxonomy, std::istream& in, std::ostream& out) {
  const MockFaults& faults = options.faults;
  out << encode_handshake({kProtocolVersion, faults.announce_role.value_or(options.role)}) << '\n'
      << std::flush;

  MockGeneratorWorker generator(workdir, taxonomy, options.generator);
  MockLabellerWorker labeller(workdir, taxonomy, options.labeller);

  std::uint64_t received = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++received;
    if (faults.crash_at && received == *faults.crash_at) std::_Exit(3);
    if (faults.hang_at && received == *faults.hang_at) {
      for (;;) std::this_thread::sleep_for(std::chrono::hours(1));
    }
    if (faults.garbage_at && received == *faults.garbage_at) {
      out << "this is not json" << '\n' << std::flush;
      continue;
    }

    Request request;
    try {
      request = parse_request(line);
    } catch (const ProtocolError& e) {
      if (e.id()) {
        Response r;
        r.id = *e.id();
        r.error = e.what();
        out << encode_response(r) << '\n' << std::flush;
      } else {
        out << encode_protocol_error(e.what()) << '\n' << std::flush;
      }
      continue;
    }

    Response r;
    r.id = request_id(request);
    if (std::holds_alternative<QuitRequest>(request)) return 0;
    if (received <= faults.fail_first) {
      r.error = "injected failure";
      out << encode_response(r) << '\n' << std::flush;
      continue;
    }
    try {
      if (const auto* g = std::get_if<GenerateRequest>(&request)) {
        if (options.role != WorkerRole::kGenerator) throw Error(ErrorKind::kWorker, "not a generator");
        r.images = generator.generate(g->label, g->seed, g->n, g->out_prefix);
      } else if (const auto* l = std::get_if<LabelRequest>(&request)) {
        if (options.role != WorkerRole::kLabeller) throw Error(ErrorKind::kWorker, "not a labeller");
        r.label = labeller.label(l->image, l->out);
      } else if (const auto* d = std::get_if<DepthRequest>(&request)) {
        if (options.role != WorkerRole::kDepth) throw Error(ErrorKind::kWorker, "not a depth worker");
        // Pseudo-depth: luminance of the image.
        const RgbImage img = decode_png_rgb(read_file_bytes(confined(workdir, d->image)));
        GrayImage depth{img.width, img.height, {}};
        depth.pixels.resize(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height));
        for (std::size_t i = 0; i < depth.pixels.size(); ++i) {
          depth.pixels[i] = static_cast<std::uint8_t>(
              (299 * img.pixels[3 * i] + 587 * img.pixels[3 * i + 1] + 114 * img.pixels[3 * i + 2]) / 1000);
        }
        write_file_bytes(confined(workdir, d->out), encode_png_gray(depth));
        r.depth = d->out;
      }
      r.ok = true;
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
    out << encode_response(r) << '\n' << std::flush;
  }
  return 0;
}

}  // namespace semcurate
