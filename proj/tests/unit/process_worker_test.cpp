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
// Drives the shipped mock worker executable through a real subprocess.

#include <chrono>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "semcurate/error.hpp"
#include "semcurate/mcoc.hpp"
#include "semcurate/mock_workers.hpp"
#include "semcurate/protocol.hpp"
#include "semcurate/taxonomy.hpp"
#include "semcurate/worker.hpp"
#include "test_support.hpp"

namespace semcurate {
namespace {

using ::testing::HasSubstr;
using testing::TempDir;

const ClassTaxonomy& urban() { return ClassTaxonomy::urban19(); }

std::string worker_cmd(const std::string& role, const std::string& extra = "") {
  return "'" + testing::mock_worker_path().string() + "' --role " + role + (extra.empty() ? "" : " " + extra);
}

WorkerTimeouts short_timeouts() {
  WorkerTimeouts t;
  t.handshake = std::chrono::milliseconds(5000);
  t.generate = std::chrono::milliseconds(5000);
  t.label = std::chrono::milliseconds(5000);
  return t;
}

class ProcessWorkerTest : public ::testing::Test {
 protected:
  void SetUp() override { save_label_map(dir_ / "src.png", testing::street_map(8)); }
  TempDir dir_;
};

TEST(SplitCommand, Quoting) {
  EXPECT_EQ(split_command("a b  'c d' \"e f\""), (std::vector<std::string>{"a", "b", "c d", "e f"}));
  EXPECT_TRUE(split_command("   ").empty());
}

TEST_F(ProcessWorkerTest, HandshakeAndQuit) {
  auto w = ProcessWorker::spawn(WorkerRole::kGenerator, worker_cmd("generator"), dir_.path(), short_timeouts());
  EXPECT_EQ(w->role(), WorkerRole::kGenerator);
  EXPECT_EQ(w->protocol_version(), 1);
  EXPECT_TRUE(w->alive());
  EXPECT_EQ(w->quit(), 0);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "logs/generator.log"));
}

TEST_F(ProcessWorkerTest, CommandNotFound) {
  try {
    ProcessWorker::spawn(WorkerRole::kGenerator, "/nonexistent/worker-binary --x", dir_.path(), short_timeouts());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kWorker);
    EXPECT_THAT(e.what(), HasSubstr("/nonexistent/worker-binary"));
  }
}

TEST_F(ProcessWorkerTest, RoleMismatch) {
  try {
    ProcessWorker::spawn(WorkerRole::kGenerator, worker_cmd("generator", "--announce-role labeller"), dir_.path(),
                         short_timeouts());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kProtocol);
    EXPECT_THAT(e.what(), HasSubstr("labeller"));
  }
}

TEST_F(ProcessWorkerTest, GenerateCounts) {
  auto w = ProcessWorker::spawn(WorkerRole::kGenerator, worker_cmd("generator"), dir_.path(), short_timeouts());
  for (std::uint32_t n : {1u, 2u, 10u}) {
    const auto refs = w->generate("src.png", 17, n, "img/n" + std::to_string(n));
    ASSERT_EQ(refs.size(), n);
    for (const auto& ref : refs) EXPECT_TRUE(std::filesystem::exists(dir_ / ref));
  }
  EXPECT_EQ(w->requests_sent(), 3u);
  EXPECT_EQ(w->quit(), 0);
}

TEST_F(ProcessWorkerTest, MatchesInProcessMockAndReplays) {
  auto w = ProcessWorker::spawn(WorkerRole::kGenerator, worker_cmd("generator", "--corruption 0.3"), dir_.path(),
                                short_timeouts());
  const auto refs = w->generate("src.png", 5, 3, "sub/a");
  const std::string bytes = testing::read_text(dir_ / refs[2]);
  w->generate("src.png", 5, 3, "sub/a");
  EXPECT_EQ(testing::read_text(dir_ / refs[2]), bytes);

  TempDir other;
  save_label_map(other / "src.png", testing::street_map(8));
  MockGeneratorOptions opts;
  opts.corruption = 0.3;
  MockGeneratorWorker local(other.path(), urban(), opts);
  local.generate("src.png", 5, 3, "sub/a");
  EXPECT_EQ(testing::read_text(other / "sub/a_2.png"), bytes);
}

TEST_F(ProcessWorkerTest, LabelRoundTrip) {
  auto gen = ProcessWorker::spawn(WorkerRole::kGenerator, worker_cmd("generator"), dir_.path(), short_timeouts());
  auto lab = ProcessWorker::spawn(WorkerRole::kLabeller, worker_cmd("labeller"), dir_.path(), short_timeouts());
  const auto refs = gen->generate("src.png", 1, 2, "img/x");
  const std::string out = lab->label(refs[1], "lab/x_1.png");
  EXPECT_EQ(out, "lab/x_1.png");
  const SemanticMap source = load_label_map(dir_ / "src.png", urban());
  EXPECT_EQ(load_label_map(dir_ / out, urban()), source);
  EXPECT_EQ(score_candidate(source, load_label_map(dir_ / out, urban())).score_exact, 1);
  EXPECT_THROW(gen->label(refs[0], "x.png"), Error);
}

TEST_F(ProcessWorkerTest, DepthRole) {
  auto gen = ProcessWorker::spawn(WorkerRole::kGenerator, worker_cmd("generator"), dir_.path(), short_timeouts());
  auto dep = ProcessWorker::spawn(WorkerRole::kDepth, worker_cmd("depth"), dir_.path(), short_timeouts());
  const auto refs = gen->generate("src.png", 1, 1, "img/d");
  EXPECT_EQ(dep->depth(refs[0], "depth/d.png"), "depth/d.png");
  EXPECT_TRUE(std::filesystem::exists(dir_ / "depth/d.png"));
}

TEST_F(ProcessWorkerTest, WorkerErrorReply) {
  auto w = ProcessWorker::spawn(WorkerRole::kGenerator, worker_cmd("generator", "--fail-first 1"), dir_.path(),
                                short_timeouts());
  try {
    w->generate("src.png", 1, 1, "img/e");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kWorker);
    EXPECT_TRUE(e.retryable());
  }
  // The handle stays usable after an error reply.
  EXPECT_EQ(w->generate("src.png", 1, 1, "img/e").size(), 1u);
  // Missing input is an error reply, not a crash.
  EXPECT_THROW(w->generate("missing.png", 1, 1, "img/m"), Error);
  EXPECT_EQ(w->quit(), 0);
}

TEST_F(ProcessWorkerTest, MalformedReplyIsProtocolFailure) {
  auto w = ProcessWorker::spawn(WorkerRole::kGenerator, worker_cmd("generator", "--garbage-at 1"), dir_.path(),
                                short_timeouts());
  try {
    w->generate("src.png", 1, 1, "img/g");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kProtocol);
  }
  EXPECT_FALSE(w->alive());
}

TEST_F(ProcessWorkerTest, CrashIsRetryable) {
  auto w = ProcessWorker::spawn(WorkerRole::kGenerator, worker_cmd("generator", "--crash-at 1"), dir_.path(),
                                short_timeouts());
  try {
    w->generate("src.png", 1, 1, "img/c");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kWorker);
    EXPECT_TRUE(e.retryable());
    EXPECT_THAT(e.what(), HasSubstr("exit code 3"));
  }
  EXPECT_FALSE(w->alive());
  EXPECT_THROW(w->generate("src.png", 1, 1, "img/c"), Error);
}

TEST_F(ProcessWorkerTest, HangTimesOut) {
  WorkerTimeouts t = short_timeouts();
  t.generate = std::chrono::milliseconds(300);
  auto w = ProcessWorker::spawn(WorkerRole::kGenerator, worker_cmd("generator", "--hang-at 1"), dir_.path(), t);
  const auto start = std::chrono::steady_clock::now();
  try {
    w->generate("src.png", 1, 1, "img/h");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTimeout);
    EXPECT_TRUE(e.retryable());
  }
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
  // Destruction must not block on the hung child.
  const auto kill_start = std::chrono::steady_clock::now();
  w.reset();
  EXPECT_LT(std::chrono::steady_clock::now() - kill_start, std::chrono::seconds(5));
}

}  // namespace
}  // namespace semcurate
