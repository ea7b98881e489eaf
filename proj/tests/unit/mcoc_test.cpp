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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "semcurate/components.hpp"
#include "semcurate/error.hpp"
#include "semcurate/mcoc.hpp"
#include "semcurate/taxonomy.hpp"
#include "test_support.hpp"

namespace semcurate {
namespace {

constexpr ClassId kRoad = 0;
constexpr ClassId kSky = 10;
constexpr ClassId kCar = 13;
constexpr ClassId kTruck = 14;

ScoreOptions strict_options() {
  ScoreOptions o;
  o.mode = AcceptanceMode::kStrict;
  return o;
}

McocReport with_score(std::size_t id, Rational score) {
  McocReport r;
  r.candidate_id = id;
  r.score_exact = score;
  return r;
}

TEST(Threshold, ExactDecimal) {
  const Threshold t = Threshold::from_double(0.7);
  EXPECT_EQ(t.num(), 7);
  EXPECT_EQ(t.den(), 10);
  EXPECT_TRUE(t.admits(7, 10));
  EXPECT_FALSE(t.admits(6, 10));
  EXPECT_TRUE(t.admits(70, 100));
  EXPECT_FALSE(t.admits(699, 1000));
  EXPECT_THROW(Threshold::from_double(0.0), Error);
  EXPECT_THROW(Threshold::from_double(1.5), Error);
  EXPECT_TRUE(Threshold::from_double(1.0).admits(5, 5));
}

TEST(ComponentAlpha, SevenCarThreeTruck) {
  SemanticMap source(10, 1, kCar);
  SemanticMap pred(10, 1, kCar);
  for (int x = 7; x < 10; ++x) pred.set(x, 0, kTruck);
  const auto cs = connected_components(source);
  const Dominance d = component_alpha(cs, 0, pred);
  ASSERT_TRUE(d.dominant_class.has_value());
  EXPECT_EQ(*d.dominant_class, kCar);
  EXPECT_EQ(d.dominant_count, 7u);
  EXPECT_DOUBLE_EQ(d.fraction(), 0.7);
  // Exactly at tau = 0.7 the component is accepted.
  const McocReport r = score_candidate(source, pred);
  EXPECT_TRUE(r.per_component[0].accepted);
}

TEST(ComponentAlpha, IdentityAndAllVoid) {
  const SemanticMap source(4, 3, kSky);
  const auto cs = connected_components(source);
  const Dominance same = component_alpha(cs, 0, source);
  EXPECT_EQ(same.dominant_class, std::optional<ClassId>(kSky));
  EXPECT_DOUBLE_EQ(same.fraction(), 1.0);
  const Dominance none = component_alpha(cs, 0, SemanticMap(4, 3));
  EXPECT_FALSE(none.dominant_class.has_value());
  EXPECT_DOUBLE_EQ(none.fraction(), 0.0);
  EXPECT_FALSE(score_candidate(source, SemanticMap(4, 3)).per_component[0].accepted);
}

TEST(ComponentAlpha, TieGoesToLowestClass) {
  SemanticMap source(4, 1, kCar);
  const SemanticMap pred(4, 1, {kTruck, kTruck, kRoad, kRoad});
  const Dominance d = component_alpha(connected_components(source), 0, pred);
  EXPECT_EQ(d.dominant_class, std::optional<ClassId>(kRoad));
}

TEST(Score, IdentityScoresOne) {
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    SemanticMap s = testing::random_blocky_map(rng, 16, 12, 5);
    s.set(0, 0, 1);
    for (auto mode : {AcceptanceMode::kLiteral, AcceptanceMode::kStrict}) {
      ScoreOptions o;
      o.mode = mode;
      const McocReport r = score_candidate(s, s, o);
      EXPECT_EQ(r.score_exact, 1);
      for (const auto& c : r.per_component) EXPECT_TRUE(c.accepted);
    }
  }
}

TEST(Score, ConstantPredictionSeparatesModes) {
  // Road, sky and car present; prediction is car everywhere.
  SemanticMap source(6, 3, kRoad);
  for (int x = 0; x < 6; ++x) source.set(x, 0, kSky);
  source.set(2, 2, kCar);
  source.set(3, 2, kCar);
  const SemanticMap pred(6, 3, kCar);
  EXPECT_EQ(score_candidate(source, pred).score_exact, 1);
  const McocReport strict = score_candidate(source, pred, strict_options());
  EXPECT_EQ(strict.score_exact, Rational(1, 3));
  EXPECT_EQ(strict.classes_present(), (ClassSet{kRoad, kSky, kCar}));
}

TEST(Score, EightByEightFixture) {
  // Road component A (10 px, top-left), a car band, road component B below.
  SemanticMap source(8, 8);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 5; ++x) source.set(x, y, kRoad);
  }
  for (int y = 2; y < 4; ++y) {
    for (int x = 0; x < 8; ++x) source.set(x, y, kCar);
  }
  for (int y = 4; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) source.set(x, y, kRoad);
  }
  SemanticMap pred = source;
  for (int x = 0; x < 4; ++x) pred.set(x, 0, kSky);  // 4 of 10 pixels of A
  const McocReport r = score_candidate(source, pred);
  ASSERT_EQ(r.per_component.size(), 3u);
  EXPECT_EQ(r.per_class.at(kRoad).ratio(), Rational(1, 2));
  EXPECT_EQ(r.per_class.at(kCar).ratio(), Rational(1));
  EXPECT_EQ(r.score_exact, Rational(3, 4));
  EXPECT_DOUBLE_EQ(r.score(), 0.75);
  EXPECT_EQ(r.score_exact, oracle::mcoc(source, pred, 7, 10, false, 4));
}

TEST(Score, Errors) {
  EXPECT_THROW(score_candidate(SemanticMap(3, 3, 1), SemanticMap(3, 4, 1)), Error);
  EXPECT_THROW(score_candidate(SemanticMap(3, 3), SemanticMap(3, 3)), Error);
}

TEST(Score, OracleEquivalenceRandom) {
  Rng rng(4242);
  const std::pair<int, int> taus[] = {{7, 10}, {1, 2}, {3, 5}, {1, 1}, {33, 100}, {9, 10}};
  for (int trial = 0; trial < 1500; ++trial) {
    const int w = 1 + static_cast<int>(rng.index(16));
    const int h = 1 + static_cast<int>(rng.index(16));
    const int k = 1 + static_cast<int>(rng.index(5));
    SemanticMap source = trial % 2 ? testing::random_blocky_map(rng, w, h, k, 6)
                                   : testing::random_map(rng, w, h, k, 0.2);
    source.set(0, 0, 0);
    SemanticMap pred = source;
    const double flip = rng.uniform();
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (rng.bernoulli(flip)) {
        pred.data()[i] = rng.bernoulli(0.1) ? kVoidId : static_cast<ClassId>(rng.index(static_cast<std::uint64_t>(k)));
      }
    }
    const auto [num, den] = taus[trial % 6];
    for (bool strict : {false, true}) {
      for (int conn : {4, 8}) {
        ScoreOptions o;
        o.tau = static_cast<double>(num) / den;
        o.mode = strict ? AcceptanceMode::kStrict : AcceptanceMode::kLiteral;
        o.connectivity = conn == 4 ? Connectivity::kFour : Connectivity::kEight;
        const McocReport r = score_candidate(source, pred, o);
        ASSERT_EQ(r.score_exact, oracle::mcoc(source, pred, num, den, strict, conn)) << "trial " << trial;
        ASSERT_GE(r.score_exact, 0);
        ASSERT_LE(r.score_exact, 1);
        ASSERT_EQ(r.classes_present(), present_classes(source));
      }
    }
  }
}

TEST(Score, PermutationInvariance) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    SemanticMap source = testing::random_blocky_map(rng, 12, 10, 5, 8);
    source.set(1, 1, 2);
    SemanticMap pred = source;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (rng.bernoulli(0.3)) pred.data()[i] = static_cast<ClassId>(rng.index(5));
    }
    std::vector<ClassId> perm(19);
    std::iota(perm.begin(), perm.end(), ClassId{0});
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
    auto apply = [&](SemanticMap m) {
      for (auto& c : m.data()) {
        if (c != kVoidId) c = perm[c];
      }
      return m;
    };
    const McocReport a = score_candidate(source, pred);
    const McocReport b = score_candidate(apply(source), apply(pred));
    ASSERT_EQ(a.score_exact, b.score_exact);
    ASSERT_EQ(a.per_component.size(), b.per_component.size());
    for (std::size_t i = 0; i < a.per_component.size(); ++i) {
      ASSERT_EQ(a.per_component[i].dominant_count, b.per_component[i].dominant_count);
      ASSERT_EQ(a.per_component[i].accepted, b.per_component[i].accepted);
    }
  }
}

TEST(Score, MonotoneDegradationStrict) {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    SemanticMap source = testing::random_blocky_map(rng, 14, 9, 4, 6);
    source.set(0, 0, 3);
    const auto cs = connected_components(source);
    const std::size_t target = rng.index(cs.size());
    const ClassId src = cs[target].class_id;
    const ClassId other = static_cast<ClassId>((src + 1) % 4);
    SemanticMap pred = source;
    std::size_t previous = cs[target].size() + 1;
    for (const Pixel& p : cs[target].pixels) {
      pred.set(p.x, p.y, other);  // superset corruption, one pixel at a time
      const McocReport r = score_candidate(source, pred, strict_options());
      const auto& c = r.per_component[target];
      const std::size_t toward_source = c.dominant_class == src ? c.dominant_count : 0;
      ASSERT_LE(toward_source, previous);
      previous = toward_source;
    }
  }
}

TEST(Selection, RankingAndTies) {
  std::vector<McocReport> reports{with_score(0, Rational(9, 10)), with_score(1, Rational(1, 2)),
                                  with_score(2, Rational(7, 10))};
  const SelectionResult one = rank_and_select("s", reports, 1);
  EXPECT_EQ(one.selected, (std::vector<std::size_t>{0}));
  EXPECT_EQ(one.ranked, (std::vector<std::size_t>{0, 2, 1}));

  std::vector<McocReport> equal;
  for (std::size_t i = 0; i < 10; ++i) equal.push_back(with_score(i, Rational(1, 2)));
  EXPECT_EQ(rank_and_select("s", equal, 3).selected, (std::vector<std::size_t>{0, 1, 2}));
  // k = N keeps everything.
  EXPECT_EQ(rank_and_select("s", equal, 10).selected.size(), 10u);
  EXPECT_THROW(rank_and_select("s", equal, 0), Error);
  EXPECT_THROW(rank_and_select("s", {}, 1), Error);
}

TEST(Selection, OrderOfInputsDoesNotMatter) {
  Rng rng(3);
  std::vector<McocReport> reports;
  for (std::size_t i = 0; i < 10; ++i) reports.push_back(with_score(i, Rational(static_cast<long>(rng.index(4)), 3)));
  const SelectionResult a = rank_and_select("s", reports, 3);
  std::reverse(reports.begin(), reports.end());
  const SelectionResult b = rank_and_select("s", reports, 3);
  EXPECT_EQ(a.ranked, b.ranked);
  EXPECT_EQ(a.selected, b.selected);
}

TEST(Pairing, PseudoAndOriginal) {
  std::vector<McocReport> reports{with_score(0, 1), with_score(1, Rational(1, 2)), with_score(2, 1)};
  const SelectionResult sel = rank_and_select("src", reports, 2);
  std::map<std::size_t, CandidateFiles> files;
  for (std::size_t i = 0; i < 3; ++i) {
    files[i] = {"img_" + std::to_string(i) + ".png", "lab_" + std::to_string(i) + ".png"};
  }
  const auto pseudo = pair_with_pseudolabels(sel, files);
  ASSERT_EQ(pseudo.size(), 2u);
  EXPECT_EQ(pseudo[0].candidate_id, 0u);
  EXPECT_EQ(pseudo[1].candidate_id, 2u);
  for (const auto& p : pseudo) {
    EXPECT_EQ(p.label_ref, "lab_" + std::to_string(p.candidate_id) + ".png");
    EXPECT_NE(p.label_ref, "source.png");
  }
  const auto original = pair_with_pseudolabels(sel, files, LabelPairing::kOriginal, "source.png");
  for (const auto& p : original) EXPECT_EQ(p.label_ref, "source.png");
  EXPECT_THROW(pair_with_pseudolabels(sel, files, LabelPairing::kOriginal), Error);
}

TEST(Report, SerializeRoundTrip) {
  Rng rng(12);
  SemanticMap source = testing::random_blocky_map(rng, 10, 10, 4);
  source.set(0, 0, 1);
  SemanticMap pred = testing::random_map(rng, 10, 10, 4, 0.1);
  const McocReport r = score_candidate(source, pred, strict_options(), 4);
  const McocReport back = parse_report(serialize_report(r, &ClassTaxonomy::urban19()));
  EXPECT_EQ(back, r);
  EXPECT_EQ(parse_rational(rational_string(Rational(3, 7))), Rational(3, 7));
  EXPECT_THROW(parse_rational("3/0"), Error);
}

}  // namespace
}  // namespace semcurate
