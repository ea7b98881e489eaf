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
#include "semcurate/worker.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>
#include <thread>

extern char** environ;

namespace semcurate {
namespace {

void ignore_sigpipe_once() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::string errno_text(int err) { return std::strerror(err); }

}  // namespace

std::vector<std::string> split_command(const std::string& command) {
  std::vector<std::string> args;
  std::string cur;
  bool in_token = false;
  char quote = 0;
  for (char c : command) {
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else {
        cur.push_back(c);
      }
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
      in_token = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (in_token) {
        args.push_back(std::move(cur));
        cur.clear();
        in_token = false;
      }
    } else {
      cur.push_back(c);
      in_token = true;
    }
  }
  if (quote) throw Error(ErrorKind::kConfig, "unterminated quote in command: " + command);
  if (in_token) args.push_back(std::move(cur));
  return args;
}

ProcessWorker::ProcessWorker(WorkerRole role, std::string command, std::filesystem::path workdir,
                             WorkerTimeouts timeouts)
    : role_(role), command_(std::move(command)), workdir_(std::move(workdir)), timeouts_(timeouts) {}

std::unique_ptr<ProcessWorker> ProcessWorker::spawn(WorkerRole role, const std::string& command,
                                                    const std::filesystem::path& workdir,
                                                    WorkerTimeouts timeouts) {
  ignore_sigpipe_once();
  auto args = split_command(command);
  if (args.empty()) throw Error(ErrorKind::kConfig, "empty worker command");
  // The child changes directory, so relative executable paths are pinned now.
  if (args[0].find('/') != std::string::npos) {
    args[0] = std::filesystem::absolute(args[0]).string();
  }
  std::filesystem::create_directories(workdir / "logs");

  std::unique_ptr<ProcessWorker> w(
      new ProcessWorker(role, command, std::filesystem::absolute(workdir), timeouts));

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw Error(ErrorKind::kWorker, "pipe failed: " + errno_text(errno));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw Error(ErrorKind::kWorker, "pipe failed: " + errno_text(errno));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  const std::string log = (w->workdir_ / "logs" / (std::string(to_string(role)) + ".log")).string();
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, log.c_str(),
                                   O_WRONLY | O_CREAT | O_APPEND, 0644);
  posix_spawn_file_actions_addchdir_np(&actions, w->workdir_.c_str());

  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw Error(ErrorKind::kWorker, "failed to spawn worker '" + command + "': " + errno_text(rc));
  }
  w->pid_ = pid;
  w->to_child_ = in_pipe[1];
  w->from_child_ = out_pipe[0];

  std::string line;
  try {
    line = w->read_line(timeouts.handshake);
  } catch (const Error& e) {
    throw Error(e.kind(), "worker '" + command + "' handshake: " + e.what());
  }
  const Handshake hs = parse_handshake(line);
  if (hs.role != role) {
    throw ProtocolError("worker '" + command + "' announced role " +
                        std::string(to_string(hs.role)) + ", expected " +
                        std::string(to_string(role)));
  }
  w->version_ = hs.version;
  return w;
}

ProcessWorker::~ProcessWorker() {
  if (pid_ > 0) {
    if (!broken_) {
      try {
        quit();
      } catch (...) {
      }
    }
    kill_and_reap();
  }
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
}

void ProcessWorker::kill_and_reap() {
  if (pid_ <= 0) return;
  ::kill(pid_, SIGKILL);
  int status = 0;
  ::waitpid(pid_, &status, 0);
  pid_ = -1;
}

void ProcessWorker::write_line(const std::string& line) {
  std::string data = line + "\n";
  const char* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    const ssize_t n = ::write(to_child_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      broken_ = true;
      throw Error(ErrorKind::kWorker, "worker '" + command_ + "' is gone (write: " +
                                          errno_text(errno) + ")");
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

std::string ProcessWorker::read_line(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      return line;
    }
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      broken_ = true;
      throw Error(ErrorKind::kTimeout, "no reply from worker '" + command_ + "' within " +
                                           std::to_string(timeout.count()) + " ms");
    }
    const auto wait_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(wait_ms, 1'000'000)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      broken_ = true;
      throw Error(ErrorKind::kWorker, "poll failed: " + errno_text(errno));
    }
    if (rc == 0) continue;
    char buf[4096];
    const ssize_t n = ::read(from_child_, buf, sizeof(buf));
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      broken_ = true;
      throw Error(ErrorKind::kWorker, "read from worker failed: " + errno_text(errno));
    }
    if (n == 0) {
      broken_ = true;
      int status = 0;
      std::string detail;
      if (::waitpid(pid_, &status, 0) == pid_) {
        pid_ = -1;
        if (WIFEXITED(status)) {
          exit_status_ = WEXITSTATUS(status);
          detail = " (exit code " + std::to_string(exit_status_) + ")";
        } else if (WIFSIGNALED(status)) {
          detail = " (signal " + std::to_string(WTERMSIG(status)) + ")";
        }
      }
      throw Error(ErrorKind::kWorker, "worker '" + command_ + "' exited" + detail);
    }
    buffer_.append(buf, static_cast<std::size_t>(n));
  }
}

Response ProcessWorker::call(Request request, std::chrono::milliseconds timeout) {
  if (broken_ || pid_ <= 0) {
    throw Error(ErrorKind::kWorker, "worker '" + command_ + "' is not running");
  }
  const std::uint64_t id = next_id_++;
  std::visit([id](auto& r) { r.id = id; }, request);
  write_line(encode_request(request));

  if (auto it = early_.find(id); it != early_.end()) {
    Response r = std::move(it->second);
    early_.erase(it);
    return r;
  }
  for (;;) {
    Response r;
    try {
      r = parse_response(read_line(timeout));
    } catch (const ProtocolError&) {
      broken_ = true;
      throw;
    }
    if (r.id == id) return r;
    if (r.id > id) {
      early_.emplace(r.id, std::move(r));
      continue;
    }
    // Stale reply to an abandoned request.
  }
}

std::vector<std::string> ProcessWorker::generate(const std::string& label_ref, std::uint64_t seed,
                                                 std::uint32_t n, const std::string& out_prefix) {
  if (role_ != WorkerRole::kGenerator) {
    throw Error(ErrorKind::kInvalidArgument, "generate called on a non-generator worker");
  }
  Response r = call(GenerateRequest{0, label_ref, seed, n, out_prefix}, timeouts_.generate);
  if (!r.ok) throw Error(ErrorKind::kWorker, r.error);
  if (r.images.size() != n) {
    broken_ = true;
    throw ProtocolError("generator returned " + std::to_string(r.images.size()) +
                            " images for n = " + std::to_string(n),
                        r.id);
  }
  for (const auto& ref : r.images) {
    if (!is_confined_ref(ref)) {
      throw ProtocolError("generator returned ref outside workdir: " + ref, r.id);
    }
  }
  return r.images;
}

std::string ProcessWorker::label(const std::string& image_ref, const std::string& out_ref) {
  if (role_ != WorkerRole::kLabeller) {
    throw Error(ErrorKind::kInvalidArgument, "label called on a non-labeller worker");
  }
  Response r = call(LabelRequest{0, image_ref, out_ref}, timeouts_.label);
  if (!r.ok) throw Error(ErrorKind::kWorker, r.error);
  if (!r.label || !is_confined_ref(*r.label)) {
    throw ProtocolError("labeller response without a confined label ref", r.id);
  }
  return *r.label;
}

std::string ProcessWorker::depth(const std::string& image_ref, const std::string& out_ref) {
  if (role_ != WorkerRole::kDepth) {
    throw Error(ErrorKind::kInvalidArgument, "depth called on a non-depth worker");
  }
  Response r = call(DepthRequest{0, image_ref, out_ref}, timeouts_.label);
  if (!r.ok) throw Error(ErrorKind::kWorker, r.error);
  auto ref = r.depth ? r.depth : r.label;
  if (!ref || !is_confined_ref(*ref)) {
    throw ProtocolError("depth response without a confined ref", r.id);
  }
  return *ref;
}

int ProcessWorker::quit() {
  if (pid_ <= 0) return exit_status_;
  if (!broken_) {
    try {
      const std::uint64_t id = next_id_++;
      write_line(encode_request(QuitRequest{id}));
    } catch (const Error&) {
    }
  }
  const auto deadline = std::chrono::steady_clock::now() + timeouts_.shutdown;
  while (std::chrono::steady_clock::now() < deadline) {
    int status = 0;
    const pid_t rc = ::waitpid(pid_, &status, WNOHANG);
    if (rc == pid_) {
      pid_ = -1;
      exit_status_ = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      return exit_status_;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  kill_and_reap();
  exit_status_ = -1;
  return exit_status_;
}

}  // namespace semcurate
