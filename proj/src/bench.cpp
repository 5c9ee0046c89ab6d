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

#include <cmath>
#include <numbers>

#include "lftree/bench.hpp"
#include "lftree/error.hpp"
#include "lftree/rng.hpp"

namespace lftree {

std::vector<Interval> LevySpec::bounds() const {
  if (box.empty()) return std::vector<Interval>(dim, Interval{});
  return box;
}

void LevySpec::validate() const {
  if (dim == 0) throw InvalidArgument("Levy dimension must be positive");
  if (samples < 2) throw InvalidArgument("Levy pool needs at least 2 samples");
  if (!box.empty() && box.size() != dim) {
    throw InvalidArgument("Levy box has " + std::to_string(box.size()) + " intervals for dimension " +
                          std::to_string(dim));
  }
  for (const auto& iv : bounds()) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
      throw InvalidArgument("Levy box interval must be finite and non-degenerate");
    }
  }
}

double levy_value(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("levy_value of an empty point");
  constexpr double pi = std::numbers::pi;
  const std::size_t d = x.size();
  auto w = [&](std::size_t i) { return 1.0 + (x[i] - 1.0) / 4.0; };

  const double s0 = std::sin(pi * w(0));
  double total = s0 * s0;
  for (std::size_t i = 0; i + 1 < d; ++i) {
    const double wi = w(i);
    const double s = std::sin(pi * wi + 1.0);
    total += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * s * s);
  }
  const double wd = w(d - 1);
  const double sd = std::sin(2.0 * pi * wd);
  total += (wd - 1.0) * (wd - 1.0) * (1.0 + sd * sd);
  return total;
}

CandidatePool make_levy_pool(const LevySpec& spec) {
  spec.validate();
  const auto bounds = spec.bounds();
  RngHandle rng(spec.seed, "bench.levy");
  std::vector<Candidate> candidates(spec.samples);
  for (std::size_t i = 0; i < spec.samples; ++i) {
    auto& c = candidates[i];
    c.id = i;
    c.features.resize(spec.dim);
    for (std::size_t j = 0; j < spec.dim; ++j) c.features[j] = rng.uniform(bounds[j].lo, bounds[j].hi);
    c.oracle_value = levy_value(c.features);
  }
  return CandidatePool(std::move(candidates), ObjectiveSense::minimize);
}

}  // namespace lftree
