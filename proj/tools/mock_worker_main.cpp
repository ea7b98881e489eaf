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
// Stand-in worker speaking protocol v1 on stdin/stdout, with fault
// injection switches for protocol tests.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "semcurate/error.hpp"
#include "semcurate/mock_workers.hpp"
#include "semcurate/protocol.hpp"
#include "semcurate/taxonomy.hpp"

using namespace semcurate;

int main(int argc, char** argv) {
  CLI::App app{"semcurate mock worker (protocol v1)"};
  std::string role = "generator";
  std::string backend = "procedural";
  std::string workdir = ".";
  std::optional<std::string> announce;
  MockServeOptions opts;

  app.add_option("--role", role, "generator | labeller | depth");
  app.add_option("--backend", backend, "only 'procedural' is available")
      ->check(CLI::IsMember({"procedural", "mock"}));
  app.add_option("--workdir", workdir, "directory refs are resolved against");
  app.add_option("--corruption", opts.generator.corruption, "component repaint probability");
  app.add_option("--jitter", opts.generator.jitter, "color jitter amplitude");
  app.add_option("--noise", opts.labeller.noise_rate, "labeller pixel noise rate");
  app.add_option("--noise-seed", opts.labeller.seed, "labeller noise seed");
  app.add_option("--announce-role", announce, "role to claim in the handshake");
  app.add_option("--crash-at", opts.faults.crash_at, "exit on this request (1-based)");
  app.add_option("--garbage-at", opts.faults.garbage_at, "answer this request with a non-JSON line");
  app.add_option("--hang-at", opts.faults.hang_at, "never answer this request");
  app.add_option("--fail-first", opts.faults.fail_first, "answer the first n requests with errors");
  CLI11_PARSE(app, argc, argv);

  try {
    opts.role = parse_worker_role(role);
    if (announce) opts.faults.announce_role = parse_worker_role(*announce);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  std::ios::sync_with_stdio(false);
  return serve_mock_worker(opts, std::filesystem::path(workdir), ClassTaxonomy::urban19(), std::cin,
                           std::cout);
}
