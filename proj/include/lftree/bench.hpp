// Copyright 2026 The lftree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LFTREE_BENCH_HPP
#define LFTREE_BENCH_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "lftree/core.hpp"

namespace lftree {

struct Interval {
  double lo = -10.0;
  double hi = 10.0;
};

struct LevySpec {
  std::size_t dim = 1;
  std::vector<Interval> box;  // empty means [-10, 10] in every dimension
  std::size_t samples = 1000;
  std::uint64_t seed = 0;

  /// Per-dimension bounds with the default box filled in.
  [[nodiscard]] std::vector<Interval> bounds() const;
  void validate() const;
};

/// Standard Levy function; non-negative with its minimum 0 at (1, ..., 1).
double levy_value(std::span<const double> x);

/// Uniform samples from the box on the "bench.levy" stream of the spec seed,
/// raw coordinates as features, Levy values as the oracle, minimized.
CandidatePool make_levy_pool(const LevySpec& spec);

}  // namespace lftree

#endif  // LFTREE_BENCH_HPP
