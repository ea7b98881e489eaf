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

#ifndef SEMCURATE_WORKER_HPP_
#define SEMCURATE_WORKER_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "semcurate/protocol.hpp"

namespace semcurate {

// Refs are always relative to the worker's working directory.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::vector<std::string> generate(const std::string& label_ref, std::uint64_t seed,
                                            std::uint32_t n, const std::string& out_prefix) = 0;
};

class Labeller {
 public:
  virtual ~Labeller() = default;
  virtual std::string label(const std::string& image_ref, const std::string& out_ref) = 0;
};

struct WorkerTimeouts {
  std::chrono::milliseconds handshake{30'000};
  std::chrono::milliseconds generate{600'000};
  std::chrono::milliseconds label{120'000};
  std::chrono::milliseconds shutdown{2'000};
};

// Splits a command line on whitespace; single and double quotes group.
std::vector<std::string> split_command(const std::string& command);

// One live worker subprocess speaking protocol v1 over its stdin/stdout.
// The child runs with `workdir` as its current directory and its stderr
// appended to `<workdir>/logs/<role>.log`. Exclusively owned; movable
// between threads but never shared.
class ProcessWorker final : public Generator, public Labeller {
 public:
  // Starts the process and waits for the handshake. Throws Error:
  // kWorker for spawn failures (command echoed), kTimeout when no
  // handshake arrives, kProtocol for a role mismatch or bad handshake.
  static std::unique_ptr<ProcessWorker> spawn(WorkerRole role, const std::string& command,
                                              const std::filesystem::path& workdir,
                                              WorkerTimeouts timeouts = {});
  ~ProcessWorker() override;

  ProcessWorker(const ProcessWorker&) = delete;
  ProcessWorker& operator=(const ProcessWorker&) = delete;

  WorkerRole role() const noexcept { return role_; }
  int protocol_version() const noexcept { return version_; }
  std::uint64_t requests_sent() const noexcept { return next_id_ - 1; }
  const std::filesystem::path& workdir() const noexcept { return workdir_; }
  bool alive() const noexcept { return pid_ > 0 && !broken_; }

  std::vector<std::string> generate(const std::string& label_ref, std::uint64_t seed,
                                    std::uint32_t n, const std::string& out_prefix) override;
  std::string label(const std::string& image_ref, const std::string& out_ref) override;
  std::string depth(const std::string& image_ref, const std::string& out_ref);

  // Sends quit and waits for exit; returns the exit status (or -1 if the
  // worker had to be killed).
  int quit();

 private:
  ProcessWorker(WorkerRole role, std::string command, std::filesystem::path workdir,
                WorkerTimeouts timeouts);

  Response call(Request request, std::chrono::milliseconds timeout);
  std::string read_line(std::chrono::milliseconds timeout);
  void write_line(const std::string& line);
  void kill_and_reap();

  WorkerRole role_;
  std::string command_;
  std::filesystem::path workdir_;
  WorkerTimeouts timeouts_;
  int version_ = 0;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::uint64_t next_id_ = 1;
  std::map<std::uint64_t, Response> early_;  // responses that arrived out of order
  bool broken_ = false;
  int exit_status_ = -1;
};

}  // namespace semcurate

#endif  // SEMCURATE_WORKER_HPP_
