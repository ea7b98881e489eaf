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
#include <algorithm>
#include <numeric>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "semcurate/error.hpp"
#include "semcurate/metrics.hpp"
#include "semcurate/taxonomy.hpp"
#include "test_support.hpp"

namespace semcurate {
namespace {

using ::testing::HasSubstr;

constexpr ClassId kRoad = 0;
constexpr ClassId kWall = 3;
constexpr ClassId kFence = 4;
constexpr ClassId kSky = 10;
constexpr ClassId kCar = 13;

const ClassTaxonomy& urban() { return ClassTaxonomy::urban19(); }

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto bar = line.find(" | ", start);
    std::string cell = line.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
    cell.erase(0, cell.find_first_not_of(' '));
    cell.erase(cell.find_last_not_of(" \n") + 1);
    cells.push_back(cell);
    if (bar == std::string::npos) break;
    start = bar + 3;
  }
  return cells;
}

TEST(Confusion, PerfectPredictionIsDiagonal) {
  Rng rng(1);
  const SemanticMap m = testing::random_map(rng, 9, 7, 19, 0.1);
  ConfusionMatrix cm(19);
  cm.accumulate(m, m);
  for (ClassId g = 0; g < 19; ++g) {
    for (ClassId p = 0; p < 19; ++p) {
      if (g != p) EXPECT_EQ(cm.count(g, p), 0u);
    }
  }
  const IouReport r = iou_report(cm, present_classes(m));
  EXPECT_EQ(r.miou, 1);
  for (ClassId c : present_classes(m)) EXPECT_EQ(*r.per_class[c].iou, 1);
}

TEST(Confusion, FourPixelFixture) {
  const SemanticMap gt(4, 1, {kRoad, kRoad, kCar, kVoidId});
  const SemanticMap pred(4, 1, {kRoad, kSky, kCar, kCar});
  ConfusionMatrix cm(19);
  cm.accumulate(pred, gt);
  EXPECT_EQ(cm.count(kRoad, kRoad), 1u);
  EXPECT_EQ(cm.count(kRoad, kSky), 1u);
  EXPECT_EQ(cm.count(kCar, kCar), 1u);
  EXPECT_EQ(cm.total(), 3u);  // void ground truth skipped

  const IouReport r = iou_report(cm, {kRoad, kSky, kCar});
  EXPECT_EQ(*r.per_class[kRoad].iou, Rational(1, 2));
  EXPECT_EQ(*r.per_class[kSky].iou, Rational(0));
  // The car prediction on void ground truth is ignored, so car is exact.
  EXPECT_EQ(*r.per_class[kCar].iou, Rational(1));
  EXPECT_EQ(r.miou, Rational(1, 2));
  EXPECT_FALSE(r.per_class[kWall].iou.has_value());
}

TEST(Confusion, VoidPredictionIsOnlyAFalseNegative) {
  const SemanticMap gt(2, 1, {kRoad, kRoad});
  const SemanticMap pred(2, 1, {kRoad, kVoidId});
  ConfusionMatrix cm(19);
  cm.accumulate(pred, gt);
  EXPECT_EQ(cm.void_predictions(kRoad), 1u);
  EXPECT_EQ(cm.row_sum(kRoad), 2u);
  const IouReport r = iou_report(cm, {kRoad});
  EXPECT_EQ(r.per_class[kRoad].fn, 1u);
  EXPECT_EQ(r.per_class[kRoad].fp, 0u);
  EXPECT_EQ(*r.per_class[kRoad].iou, Rational(1, 2));
}

TEST(Confusion, UndefinedClassScoresZero) {
  ConfusionMatrix cm(19);
  cm.accumulate(SemanticMap(2, 2, kRoad), SemanticMap(2, 2, kRoad));
  const IouReport r = iou_report(cm, {kRoad, kCar});
  EXPECT_EQ(*r.per_class[kCar].iou, 0);
  EXPECT_EQ(r.miou, Rational(1, 2));
}

TEST(Confusion, Errors) {
  ConfusionMatrix cm(19);
  EXPECT_THROW(cm.accumulate(SemanticMap(2, 2, 0), SemanticMap(3, 2, 0)), Error);
  EXPECT_THROW(cm.accumulate(SemanticMap(1, 1, 0), SemanticMap(1, 1, 40)), Error);
  EXPECT_THROW(cm.accumulate(SemanticMap(1, 1, 40), SemanticMap(1, 1, 0)), Error);
}

TEST(Confusion, AdditiveAndOrderIndependent) {
  Rng rng(9);
  std::vector<std::pair<SemanticMap, SemanticMap>> pairs;
  for (int i = 0; i < 12; ++i) {
    pairs.emplace_back(testing::random_map(rng, 6, 5, 6, 0.1), testing::random_map(rng, 6, 5, 6, 0.1));
  }
  ConfusionMatrix forward(19);
  for (const auto& [p, g] : pairs) forward.accumulate(p, g);

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  for (int shuffle = 0; shuffle < 10; ++shuffle) {
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
    ConfusionMatrix a(19), b(19);
    for (std::size_t i = 0; i < order.size(); ++i) {
      (i % 2 ? a : b).accumulate(pairs[order[i]].first, pairs[order[i]].second);
    }
    a.merge(b);
    EXPECT_EQ(a, forward);
  }

  // Two maps side by side equal accumulating each.
  const auto& [p0, g0] = pairs[0];
  const auto& [p1, g1] = pairs[1];
  SemanticMap pc(12, 5), gc(12, 5);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 6; ++x) {
      pc.set(x, y, p0.at(x, y));
      gc.set(x, y, g0.at(x, y));
      pc.set(x + 6, y, p1.at(x, y));
      gc.set(x + 6, y, g1.at(x, y));
    }
  }
  ConfusionMatrix concat(19), sep(19);
  concat.accumulate(pc, gc);
  sep.accumulate(p0, g0);
  sep.accumulate(p1, g1);
  EXPECT_EQ(concat, sep);
}

TEST(Iou, MatchesSetOracle) {
  Rng rng(55);
  for (int trial = 0; trial < 300; ++trial) {
    const SemanticMap gt = testing::random_map(rng, 8, 8, 5, 0.15);
    const SemanticMap pred = testing::random_map(rng, 8, 8, 5, 0.15);
    ClassSet evaluated;
    for (ClassId c = 0; c < 5; ++c) {
      if (rng.bernoulli(0.8)) evaluated.insert(c);
    }
    if (evaluated.empty()) evaluated.insert(0);
    const IouReport r = iou_report(accumulate(ConfusionMatrix(19), pred, gt), evaluated);
    const auto expected = oracle::iou_counts(pred, gt, 5);
    Rational sum = 0;
    for (ClassId c : evaluated) {
      const auto& k = expected.at(c);
      ASSERT_EQ(r.per_class[c].tp, static_cast<std::uint64_t>(k.tp));
      ASSERT_EQ(r.per_class[c].fp, static_cast<std::uint64_t>(k.fp));
      ASSERT_EQ(r.per_class[c].fn, static_cast<std::uint64_t>(k.fn));
      const long denom = k.tp + k.fp + k.fn;
      const Rational iou = denom == 0 ? Rational(0) : Rational(k.tp, denom);
      ASSERT_EQ(*r.per_class[c].iou, iou);
      sum += iou;
    }
    ASSERT_EQ(r.miou, sum / static_cast<int>(evaluated.size()));
    ASSERT_GE(r.miou, 0);
    ASSERT_LE(r.miou, 1);
  }
}

TEST(Iou, PermutationPermutesClasses) {
  Rng rng(56);
  std::vector<ClassId> perm(19);
  std::iota(perm.begin(), perm.end(), ClassId{0});
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
  auto apply = [&](SemanticMap m) {
    for (auto& c : m.data()) {
      if (c != kVoidId) c = perm[c];
    }
    return m;
  };
  const SemanticMap gt = testing::random_map(rng, 10, 10, 19, 0.1);
  const SemanticMap pred = testing::random_map(rng, 10, 10, 19, 0.1);
  const ClassSet all = urban().all_ids();
  const IouReport a = iou_report(accumulate(ConfusionMatrix(19), pred, gt), all);
  const IouReport b = iou_report(accumulate(ConfusionMatrix(19), apply(pred), apply(gt)), all);
  EXPECT_EQ(a.miou, b.miou);
  for (ClassId c = 0; c < 19; ++c) EXPECT_EQ(*a.per_class[c].iou, *b.per_class[perm[c]].iou);
}

TEST(Table, AbsentClassesRenderDash) {
  ClassSet veis = urban().all_ids();
  veis.erase(kWall);
  veis.erase(kFence);
  ASSERT_EQ(veis.size(), 17u);
  Rng rng(4);
  const SemanticMap gt = testing::random_map(rng, 12, 12, 19, 0.0);
  const IouReport r = iou_report(accumulate(ConfusionMatrix(19), gt, gt), veis);
  EXPECT_EQ(r.evaluated.size(), 17u);
  EXPECT_FALSE(r.iou_value(kWall).has_value());
  EXPECT_FALSE(r.iou_value(kFence).has_value());

  const std::string table = format_iou_table(r, urban(), "mock");
  const auto nl = table.find('\n');
  const auto header = split_cells(table.substr(0, nl));
  const auto cells = split_cells(table.substr(nl + 1));
  const std::vector<std::string> expected_header{
      "Method", "mIoU", "Rd",  "Sdwk", "Bldg", "Wall", "Fnc",   "Pole", "TLgt", "TSign", "Veg",
      "Terr",   "Sky",  "Pers", "Rdr", "Car",  "Trck", "Bus", "Train", "Mcy",  "Bike"};
  EXPECT_EQ(header, expected_header);
  ASSERT_EQ(cells.size(), 21u);
  EXPECT_EQ(cells[0], "mock");
  EXPECT_EQ(cells[2 + kWall], "-");
  EXPECT_EQ(cells[2 + kFence], "-");
  EXPECT_EQ(cells[2 + kRoad], "100.0");
}

TEST(Table, PercentWithOneDecimal) {
  const SemanticMap gt(3, 1, {kRoad, kRoad, kRoad});
  const SemanticMap pred(3, 1, {kRoad, kSky, kSky});
  const IouReport r = iou_report(accumulate(ConfusionMatrix(19), pred, gt), {kRoad});
  EXPECT_THAT(format_iou_table(r, urban()), HasSubstr("33.3"));
}

}  // namespace
}  // namespace semcurate
