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
#include <benchmark/benchmark.h>

#include "semcurate/components.hpp"
#include "semcurate/erosion.hpp"
#include "semcurate/mcoc.hpp"
#include "semcurate/metrics.hpp"
#include "test_support.hpp"

namespace semcurate {
namespace {

// Street layouts at a few training-crop sizes.
SemanticMap scene(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  return testing::street_map(42, w, w / 2);
}

void BM_Components(benchmark::State& state) {
  const SemanticMap m = scene(state);
  for (auto _ : state) benchmark::DoNotOptimize(connected_components(m, Connectivity::kFour));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.size()));
}
BENCHMARK(BM_Components)->Arg(128)->Arg(512)->Arg(1024);

void BM_Erosion(benchmark::State& state) {
  const SemanticMap m = scene(state);
  ErosionPolicy p;
  p.lambda = 0.15;
  p.mode = RadiusMode::kSqrt;
  for (auto _ : state) benchmark::DoNotOptimize(erode_components(m, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.size()));
}
BENCHMARK(BM_Erosion)->Arg(128)->Arg(512)->Arg(1024);

void BM_Mcoc(benchmark::State& state) {
  const SemanticMap src = scene(state);
  const SemanticMap pred = testing::street_map(43, src.width(), src.height());
  const ComponentSet comps = connected_components(src, Connectivity::kFour);
  for (auto _ : state) benchmark::DoNotOptimize(score_candidate(comps, pred));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(src.size()));
}
BENCHMARK(BM_Mcoc)->Arg(128)->Arg(512)->Arg(1024);

void BM_Confusion(benchmark::State& state) {
  const SemanticMap gt = scene(state);
  const SemanticMap pred = testing::street_map(43, gt.width(), gt.height());
  for (auto _ : state) {
    ConfusionMatrix cm(19);
    cm.accumulate(pred, gt);
    benchmark::DoNotOptimize(cm);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(gt.size()));
}
BENCHMARK(BM_Confusion)->Arg(512)->Arg(1024);

}  // namespace
}  // namespace semcurate

BENCHMARK_MAIN();
