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

#ifndef LFTREE_CONFIG_HPP
#define LFTREE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lftree/aftree.hpp"
#include "lftree/bench.hpp"
#include "lftree/clustering.hpp"
#include "lftree/selection.hpp"
#include "lftree/stats.hpp"

namespace lftree {

enum class PoolKind { levy, csv };
enum class ClusteringKind { none, kmeans, llm, file };
enum class Policy { llmat, lfbo_root, random };

std::string to_string(PoolKind kind);
std::string to_string(ClusteringKind kind);
std::string to_string(Policy policy);
Policy parse_policy(const std::string& text);

struct PoolConfig {
  PoolKind kind = PoolKind::levy;
  LevySpec levy;  // box comes from levy_lo and levy_hi
  double levy_lo = -10.0;
  double levy_hi = 10.0;
  std::filesystem::path path;  // csv or json pool file
  ObjectiveSense sense = ObjectiveSense::maximize;

  [[nodiscard]] LevySpec levy_spec() const;
};

struct ClusteringConfig {
  ClusteringKind kind = ClusteringKind::none;
  std::size_t clusters = 5;
  std::size_t max_iters = 100;
  std::filesystem::path labels;  // label file, also the LLM label cache
  std::string task = "redoxmer";
  std::filesystem::path template_path;  // empty selects the builtin template of `task`
  std::size_t batch_size = 50;
  LlmEndpointConfig endpoint;
};

/// Everything one optimization run depends on.
///
/// The text form is a sectioned key-value file:
///
///   [pool]        source, path, sense, levy_dim, levy_samples, levy_seed, levy_lo, levy_hi
///   [clustering]  source, clusters, max_iters, labels, task, template, batch_size,
///                 base_url, model, api_key_env, timeout, max_retries, temperature,
///                 parallelism
///   [optimizer]   policy, utility, gamma, lambda, eta, max_depth, min_leaf, score,
///                 p_threshold, correction, epochs, batch_size, learning_rate,
///                 weight_decay
///   [run]         seed, n_init, budget
///
/// Values may be quoted; `#` starts a comment. Every key is also addressable
/// as "section.key" through set().
struct RunConfig {
  PoolConfig pool;
  ClusteringConfig clustering;
  Policy policy = Policy::llmat;
  TreeConfig tree;
  ScoreSpec score;
  double p_threshold = 0.0;
  Correction correction = Correction::none;
  std::size_t n_init = 10;
  std::size_t budget = 30;
  std::uint64_t seed = 0;

  /// Parses the text form on top of the defaults. Relative paths resolve
  /// against `base_dir`.
  static RunConfig parse(const std::string& text, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);

  /// Assigns one "section.key". Throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value,
           const std::filesystem::path& base_dir = {});
  /// Throws ConfigError naming the offending field.
  void validate() const;
  [[nodiscard]] std::string to_json() const;

  static std::vector<std::string> keys();
};

}  // namespace lftree

#endif  // LFTREE_CONFIG_HPP
