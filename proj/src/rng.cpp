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

#include "lftree/rng.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "lftree/error.hpp"

namespace lftree {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::string_view label) {
  return splitmix64(splitmix64(seed) ^ fnv1a64(label));
}

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t basis) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = basis;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t fnv1a64(std::string_view text, std::uint64_t basis) {
  return fnv1a64(text.data(), text.size(), basis);
}

RngHandle::RngHandle(std::uint64_t seed, std::string label)
    : seed_(seed), label_(std::move(label)), engine_(stream_key(seed_, label_)) {}

RngHandle RngHandle::derive(std::string_view sublabel) const {
  std::string child = label_;
  child += '/';
  child += sublabel;
  return RngHandle(seed_, std::move(child));
}

double RngHandle::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngHandle::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::size_t RngHandle::below(std::size_t n) {
  if (n == 0) {
    throw InvalidArgument("RngHandle::below: empty range");
  }
  // Rejection sampling keeps the result unbiased.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = engine_();
  while (draw >= limit) {
    draw = engine_();
  }
  return static_cast<std::size_t>(draw % bound);
}

std::vector<std::size_t> RngHandle::sample_without_replacement(std::size_t n, std::size_t count) {
  if (count > n) {
    throw InvalidArgument("sample_without_replacement: count exceeds population");
  }
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(indices[i], indices[i + below(n - i)]);
  }
  indices.resize(count);
  return indices;
}

}  // namespace lftree
