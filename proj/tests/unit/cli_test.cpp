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
// Runs the `semcurate` executable end to end and checks exit codes and files.

#include <fstream>

#include <gmock/gmock.h>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "semcurate/label_map.hpp"
#include "semcurate/manifest.hpp"
#include "semcurate/mcoc.hpp"
#include "semcurate/taxonomy.hpp"
#include "test_support.hpp"

namespace semcurate {
namespace {

using ::testing::HasSubstr;
using testing::TempDir;
using json = nlohmann::json;

const ClassTaxonomy& urban() { return ClassTaxonomy::urban19(); }

void write(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::vector<SemanticMap> maps;
    std::vector<std::string> ids;
    for (int i = 0; i < 4; ++i) {
      maps.push_back(testing::street_map(40 + i, 64, 32));
      ids.push_back("m" + std::to_string(i));
    }
    manifest_ = testing::write_map_manifest(dir_ / "src", maps, ids);
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), testing::cli_path().string());
    return testing::run_process(args, dir_ / "stdout.txt", dir_ / "stderr.txt");
  }
  std::string out() const { return testing::read_text(dir_ / "stdout.txt"); }
  std::string err() const { return testing::read_text(dir_ / "stderr.txt"); }

  TempDir dir_;
  std::filesystem::path manifest_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(run({"--help"}), 0);
  EXPECT_THAT(out(), HasSubstr("curate"));
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"bogus"}), 2);
  EXPECT_EQ(run({"curate", "--N", "many"}), 2);
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  const std::string out_dir = (dir_ / "out").string();
  EXPECT_EQ(run({"--out", out_dir, "curate", "--manifest", manifest_.string(), "--N", "2", "--k", "3"}), 2);
  EXPECT_THAT(err(), HasSubstr("config"));
  EXPECT_EQ(run({"--out", out_dir, "curate", "--manifest", manifest_.string(), "--tau", "1.2"}), 2);
  EXPECT_EQ(run({"--out", out_dir, "curate"}), 2);
  write(dir_ / "bad.json", "{\"N\": ");
  EXPECT_EQ(run({"--config", (dir_ / "bad.json").string(), "curate"}), 2);
  EXPECT_EQ(run({"--config", (dir_ / "absent.json").string(), "curate"}), 2);
  EXPECT_FALSE(std::filesystem::exists(dir_ / "out"));
}

TEST_F(CliTest, CurateWithConfigFile) {
  write(dir_ / "cfg/run.json", R"({"source_manifest": "../src/manifest.jsonl", "N": 3, "k": 1, "seed": 5})");
  const std::string out_dir = (dir_ / "out").string();
  ASSERT_EQ(run({"--config", (dir_ / "cfg/run.json").string(), "--out", out_dir, "curate"}), 0) << err();
  EXPECT_THAT(out(), HasSubstr("4 entries curated, 4 records"));
  std::filesystem::path run_dir;
  for (const auto& e : std::filesystem::directory_iterator(dir_ / "out")) run_dir = e.path();
  const DatasetManifest curated = read_manifest(run_dir / "manifest.jsonl");
  EXPECT_EQ(curated.entries.size(), 4u);
  EXPECT_EQ(curated.header.meta.at("N"), "3");

  // Flags override the file; the rerun resumes.
  ASSERT_EQ(run({"--config", (dir_ / "cfg/run.json").string(), "--out", out_dir, "--workers", "2", "curate"}), 0);
  EXPECT_THAT(out(), HasSubstr("4 resumed"));
}

TEST_F(CliTest, StopAfterIsPartial) {
  const std::string out_dir = (dir_ / "out").string();
  EXPECT_EQ(run({"--out", out_dir, "curate", "--manifest", manifest_.string(), "--N", "2", "--k", "1",
                 "--stop-after", "1"}),
            3);
  EXPECT_EQ(run({"--out", out_dir, "curate", "--manifest", manifest_.string(), "--N", "2", "--k", "1"}), 0);
  EXPECT_THAT(out(), HasSubstr("1 resumed"));
}

TEST_F(CliTest, MissingSourceIsPartial) {
  std::filesystem::remove(dir_ / "src/labels/m2.png");
  EXPECT_EQ(run({"--out", (dir_ / "out").string(), "curate", "--manifest", manifest_.string(), "--N", "2",
                 "--k", "1"}),
            3);
  EXPECT_THAT(err(), HasSubstr("m2"));
}

TEST_F(CliTest, ProtocolViolationExitsFour) {
  const std::string worker = "'" + testing::mock_worker_path().string() + "'";
  EXPECT_EQ(run({"--out", (dir_ / "out").string(), "curate", "--manifest", manifest_.string(), "--N", "2",
                 "--k", "1", "--generator", worker + " --role generator --garbage-at 1"}),
            4);
  EXPECT_THAT(err(), HasSubstr("protocol"));
  EXPECT_EQ(run({"--out", (dir_ / "out2").string(), "curate", "--manifest", manifest_.string(), "--N", "2",
                 "--k", "1", "--generator", worker + " --role labeller"}),
            4);
}

TEST_F(CliTest, CurateWithSubprocessWorkers) {
  const std::string worker = "'" + testing::mock_worker_path().string() + "'";
  ASSERT_EQ(run({"--out", (dir_ / "out").string(), "curate", "--manifest", manifest_.string(), "--N", "3",
                 "--k", "2", "--generator", worker + " --role generator --corruption 0.2", "--labeller",
                 worker + " --role labeller"}),
            0)
      << err();
  EXPECT_THAT(out(), HasSubstr("8 records"));
}

TEST_F(CliTest, ScoreErodeHarmonize) {
  const SemanticMap src = testing::street_map(3, 64, 32);
  save_label_map(dir_ / "a.png", src);
  ASSERT_EQ(run({"score", (dir_ / "a.png").string(), (dir_ / "a.png").string()}), 0);
  const McocReport same = parse_report(out());
  EXPECT_EQ(same.score_exact, 1);

  ASSERT_EQ(run({"erode", (dir_ / "a.png").string(), (dir_ / "e.png").string(), "--lambda", "0.01"}), 0);
  const SemanticMap eroded = load_label_map(dir_ / "e.png", urban());
  EXPECT_EQ(eroded.width(), 64);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (eroded.data()[i] != src.data()[i]) {
      EXPECT_EQ(eroded.data()[i], kVoidId);
      ++changed;
    }
  }
  EXPECT_GT(changed, 0u);
  EXPECT_EQ(run({"erode", (dir_ / "a.png").string(), (dir_ / "x.png").string(), "--radius-mode", "cubic"}), 2);
  EXPECT_EQ(run({"erode", (dir_ / "missing.png").string(), (dir_ / "x.png").string()}), 1);

  SemanticMap raw(3, 1);
  raw.set(0, 0, 7);
  raw.set(1, 0, 26);
  raw.set(2, 0, 99);
  save_label_map(dir_ / "raw.png", raw);
  write(dir_ / "map.txt", "7 -> road\n26 -> car\n");
  ASSERT_EQ(run({"harmonize", (dir_ / "raw.png").string(), (dir_ / "h.png").string(), "--mapping",
                 (dir_ / "map.txt").string()}),
            0)
      << err();
  const SemanticMap h = load_label_map(dir_ / "h.png", urban());
  EXPECT_EQ(h.at(0, 0), *urban().find("road"));
  EXPECT_EQ(h.at(1, 0), *urban().find("car"));
  EXPECT_EQ(h.at(2, 0), kVoidId);
  EXPECT_NE(run({"harmonize", (dir_ / "raw.png").string(), (dir_ / "h.png").string(), "--mapping",
                 (dir_ / "map.txt").string(), "--strict"}),
            0);
  EXPECT_EQ(run({"harmonize", (dir_ / "raw.png").string(), (dir_ / "h.png").string()}), 2);
}

TEST_F(CliTest, FreqSubsetConditionsEvaluate) {
  ASSERT_EQ(run({"freq", manifest_.string(), "--cache-dir", (dir_ / "cache").string()}), 0) << err();
  EXPECT_THAT(out(), HasSubstr("road"));
  EXPECT_THAT(err(), HasSubstr("cache miss"));
  ASSERT_EQ(run({"freq", manifest_.string(), "--cache-dir", (dir_ / "cache").string(), "--verify"}), 0);
  EXPECT_THAT(err(), HasSubstr("cache hit"));

  const std::string sub = (dir_ / "sub/s.jsonl").string();
  ASSERT_EQ(run({"subset", "--manifest", manifest_.string(), "--recipe", R"([{"op":"stride","stride":2}])",
                 "--output", sub}),
            0)
      << err();
  EXPECT_EQ(read_manifest(sub).entries.size(), 2u);
  EXPECT_EQ(run({"subset", "--manifest", manifest_.string(), "--recipe", R"([{"op":"nope"}])"}), 2);

  ASSERT_EQ(run({"--out", (dir_ / "out").string(), "--seed", "3", "conditions", "--manifest", manifest_.string()}),
            0)
      << err();
  EXPECT_TRUE(std::filesystem::exists(dir_ / "out/conditions/conditions.jsonl"));
  EXPECT_THAT(out(), HasSubstr("4 records"));

  ASSERT_EQ(run({"evaluate", "--pred", manifest_.string(), "--gt", manifest_.string(), "--json"}), 0) << err();
  const json rep = json::parse(out());
  EXPECT_DOUBLE_EQ(rep.at("miou").get<double>(), 1.0);
  ASSERT_EQ(run({"evaluate", "--pred", manifest_.string(), "--gt", manifest_.string(), "--method", "ours",
                 "--classes", "road,car"}),
            0);
  EXPECT_THAT(out(), HasSubstr("ours"));
  EXPECT_EQ(run({"evaluate", "--pred", manifest_.string(), "--gt", manifest_.string(), "--classes", "spaceship"}),
            2);
}

}  // namespace
}  // namespace semcurate
