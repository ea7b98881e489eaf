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

#ifndef SEMCURATE_RANDOM_HPP_
#define SEMCURATE_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <span>

namespace semcurate {

// Seeded stream with platform-independent derived distributions. The
// standard <random> distributions are implementation-defined, so only the
// raw engine output is used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n). Unbiased (rejection sampling). n must be > 0.
  std::uint64_t index(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  // Index drawn proportionally to non-negative weights. At least one weight
  // must be positive.
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Uniform in [0, 1), a pure function of (seed, counter).
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

}  // namespace semcurate

#endif  // SEMCURATE_RANDOM_HPP_
