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

#ifndef LFTREE_RNG_HPP
#define LFTREE_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace lftree {

/// Deterministic random stream identified by a root seed and a label.
///
/// Every consumer derives its own stream from the run seed with a label that
/// names the module and purpose ("aftree/round-3/node-0"). The engine is
/// std::mt19937_64, whose output sequence is fixed by the standard, and all
/// conversions to doubles and bounded integers are done here rather than with
/// the implementation-defined std distributions. Identical (seed, label) pairs
/// therefore produce identical draws on every platform.
class RngHandle {
 public:
  RngHandle(std::uint64_t seed, std::string label);

  /// A new independent stream labelled `<label>/<sublabel>`.
  [[nodiscard]] RngHandle derive(std::string_view sublabel) const;

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] const std::string& label() const { return label_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n);

  /// In-place Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[below(i)]);
    }
  }

  /// `count` distinct indices drawn uniformly from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count);

 private:
  std::uint64_t seed_;
  std::string label_;
  std::mt19937_64 engine_;
};

/// 64-bit FNV-1a over raw bytes; used for stream derivation and digests.
std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(std::string_view text, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace lftree

#endif  // LFTREE_RNG_HPP
