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

#ifndef LFTREE_STATS_HPP
#define LFTREE_STATS_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lftree/core.hpp"

namespace lftree {

/// Variances below this value are raised to it when forming Welch weights.
inline constexpr double kVarianceFloor = 1e-12;

struct GroupSummary {
  int label = 0;
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased (divisor n - 1); 0 when n < 2

  static GroupSummary from_values(int label, std::span<const double> values);
};

struct WelchResult {
  double f = 0.0;
  double df_num = 0.0;  // k - 1
  double df_den = 0.0;  // Satterthwaite approximation
  double p_value = 1.0;
};

struct PairwiseResult {
  int label_i = 0;
  int label_j = 0;
  double t = 0.0;  // positive when group i has the larger mean
  double df = 0.0;
  double p_value = 1.0;
};

enum class Correction { none, bonferroni };

std::string to_string(Correction correction);
Correction parse_correction(const std::string& text);

/// Welch's heteroscedastic one-way ANOVA over the groups with n >= 2.
/// Returns nullopt when fewer than two groups are eligible.
std::optional<WelchResult> welch_anova(std::span<const GroupSummary> groups);

/// Games-Howell comparison of one pair. `multiplier` scales the raw p-value
/// (Bonferroni), capped at 1.
PairwiseResult games_howell_pair(const GroupSummary& a, const GroupSummary& b,
                                 double multiplier = 1.0);

/// All pairs (i < j in input order). Every group needs n >= 2.
std::vector<PairwiseResult> games_howell(std::span<const GroupSummary> groups,
                                         Correction correction);

struct ClusterSelection {
  std::vector<int> retained;  // sorted labels, never empty
  std::vector<int> excluded;  // sorted labels
  std::optional<WelchResult> welch;
  std::vector<PairwiseResult> comparisons;  // best cluster against each other eligible one
  std::optional<int> best_label;
};

/// Keeps the clusters whose observed values are not significantly below the
/// best-mean cluster.
///
/// A threshold of 0 disables filtering. Otherwise Welch's ANOVA gates the
/// post-hoc step; when its p-value falls below the threshold, every eligible
/// cluster whose mean is lower than the best one and whose Games-Howell
/// p-value against it is below the threshold is excluded. Clusters with fewer
/// than two observations are always retained.
ClusterSelection select_clusters(const ObservationSet& obs, const CandidatePool& pool,
                                 double p_threshold, Correction correction);

/// The same rule on raw values per label (index = label).
ClusterSelection select_groups(const std::vector<std::vector<double>>& values, double p_threshold,
                               Correction correction);

/// Groups (label, value) rows by label in ascending label order.
std::vector<GroupSummary> summarize_groups(std::span<const int> labels, std::span<const double> values);

}  // namespace lftree

#endif  // LFTREE_STATS_HPP
