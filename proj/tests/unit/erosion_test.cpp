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
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "semcurate/components.hpp"
#include "semcurate/erosion.hpp"
#include "semcurate/error.hpp"
#include "test_support.hpp"

namespace semcurate {
namespace {

oracle::ErosionParams params_of(const ErosionPolicy& p) {
  oracle::ErosionParams o;
  o.lambda = p.lambda;
  o.sqrt_mode = p.mode == RadiusMode::kSqrt;
  o.cap = p.radius_cap;
  o.cap_to_bbox = p.cap_to_bbox;
  o.connectivity = static_cast<int>(p.connectivity);
  return o;
}

// 5x5 square of class 3 inside a void frame.
SemanticMap framed_square() {
  SemanticMap m(7, 7);
  for (int y = 1; y <= 5; ++y) {
    for (int x = 1; x <= 5; ++x) m.set(x, y, 3);
  }
  return m;
}

TEST(Erosion, ZeroLambdaIsIdentity) {
  Rng rng(1);
  ErosionPolicy p;
  p.lambda = 0.0;
  for (int i = 0; i < 20; ++i) {
    const SemanticMap m = testing::random_blocky_map(rng, 30, 20, 5);
    EXPECT_EQ(erode_components(m, p), m);
  }
}

TEST(Erosion, RadiusRules) {
  const SemanticMap m = framed_square();
  const auto cs = connected_components(m);
  ErosionPolicy p;
  p.lambda = 0.04;  // 0.04 * 25 = 1
  EXPECT_EQ(erosion_radius(cs[0], p), 1);
  p.lambda = 0.15;  // floor(3.75) = 3, capped by min(5, 5) / 2 = 2
  EXPECT_EQ(erosion_radius(cs[0], p), 2);
  p.cap_to_bbox = false;
  EXPECT_EQ(erosion_radius(cs[0], p), 3);
  p.radius_cap = 1;
  EXPECT_EQ(erosion_radius(cs[0], p), 1);
  p = ErosionPolicy{};
  p.mode = RadiusMode::kSqrt;
  p.lambda = 0.5;  // 0.5 * sqrt(25) = 2.5
  p.cap_to_bbox = false;
  EXPECT_EQ(erosion_radius(cs[0], p), 2);
}

TEST(Erosion, SquareRadiusOneKeepsInnerThreeByThree) {
  ErosionPolicy p;
  p.lambda = 0.04;
  const SemanticMap out = erode_components(framed_square(), p);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 7; ++x) {
      const bool inner = x >= 2 && x <= 4 && y >= 2 && y <= 4;
      EXPECT_EQ(out.at(x, y), inner ? 3 : kVoidId) << x << "," << y;
    }
  }
}

TEST(Erosion, SinglePixelVanishes) {
  SemanticMap m(5, 5);
  m.set(2, 2, 7);
  ErosionPolicy p;
  p.lambda = 1.0;
  p.cap_to_bbox = false;
  const SemanticMap out = erode_components(m, p);
  EXPECT_EQ(out.at(2, 2), kVoidId);
  // With the default bbox cap a 1x1 component gets radius 0 and stays.
  EXPECT_EQ(erode_components(m, ErosionPolicy{}).at(2, 2), 7);
}

TEST(Erosion, ImageBorderDoesNotErode) {
  const SemanticMap full(6, 6, 4);
  ErosionPolicy p;
  p.lambda = 1.0;
  EXPECT_EQ(erode_components(full, p), full);
}

TEST(Erosion, NeighboursDoNotShield) {
  // Two touching 4x4 blocks of different classes fill a void-framed 10x6
  // map; each erodes along the shared edge as well.
  SemanticMap m(10, 6);
  for (int y = 1; y <= 4; ++y) {
    for (int x = 1; x <= 8; ++x) m.set(x, y, x <= 4 ? 1 : 2);
  }
  ErosionPolicy p;
  p.lambda = 1.0 / 16.0;
  const SemanticMap out = erode_components(m, p);
  EXPECT_EQ(out.at(4, 2), kVoidId);
  EXPECT_EQ(out.at(5, 2), kVoidId);
  EXPECT_EQ(out.at(3, 2), 1);
  EXPECT_EQ(out.at(6, 2), 2);
}

TEST(Erosion, RejectsBadPolicy) {
  ErosionPolicy p;
  p.lambda = -1;
  EXPECT_THROW(erode_components(SemanticMap(2, 2, 0), p), Error);
  p.lambda = 0.1;
  p.radius_cap = -2;
  EXPECT_THROW(erode_components(SemanticMap(2, 2, 0), p), Error);
}

// Soundness, monotonicity in lambda, and equivalence with a per-component
// disc-erosion oracle.
TEST(Erosion, PropertiesOnRandomMaps) {
  Rng rng(2024);
  const double lambdas[] = {0.0, 0.01, 0.05, 0.15, 0.4, 1.0};
  for (int trial = 0; trial < 120; ++trial) {
    const int w = 1 + static_cast<int>(rng.index(32));
    const int h = 1 + static_cast<int>(rng.index(32));
    const SemanticMap m = trial % 3 == 0 ? testing::random_map(rng, w, h, 3, 0.3)
                                         : testing::random_blocky_map(rng, w, h, 4);
    ErosionPolicy p;
    p.mode = trial % 2 ? RadiusMode::kSqrt : RadiusMode::kLinear;
    p.cap_to_bbox = trial % 4 != 1;
    if (trial % 5 == 0) p.radius_cap = 2;
    p.connectivity = trial % 7 == 0 ? Connectivity::kEight : Connectivity::kFour;

    SemanticMap previous = m;
    for (double lambda : lambdas) {
      p.lambda = lambda;
      const SemanticMap out = erode_components(m, p);
      ASSERT_EQ(out, oracle::disc_erode(m, params_of(p))) << "trial " << trial << " lambda " << lambda;
      for (std::size_t i = 0; i < m.size(); ++i) {
        ASSERT_TRUE(out.data()[i] == m.data()[i] || out.data()[i] == kVoidId);
        if (previous.data()[i] == kVoidId) ASSERT_EQ(out.data()[i], kVoidId);
      }
      previous = out;
    }
  }
}

}  // namespace
}  // namespace semcurate
