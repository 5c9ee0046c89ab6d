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

#include "lftree/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "lftree/error.hpp"
#include "lftree/special_functions.hpp"

namespace lftree {

GroupSummary GroupSummary::from_values(int label, std::span<const double> values) {
  GroupSummary g;
  g.label = label;
  g.n = values.size();
  if (values.empty()) return g;
  double sum = 0.0;
  for (double v : values) sum += v;
  g.mean = sum / static_cast<double>(g.n);
  if (g.n >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - g.mean) * (v - g.mean);
    g.variance = ss / static_cast<double>(g.n - 1);
  }
  return g;
}

std::string to_string(Correction correction) {
  return correction == Correction::none ? "none" : "bonferroni";
}

Correction parse_correction(const std::string& text) {
  if (text == "none") return Correction::none;
  if (text == "bonferroni") return Correction::bonferroni;
  throw InvalidArgument("unknown correction '" + text + "' (expected none or bonferroni)");
}

std::optional<WelchResult> welch_anova(std::span<const GroupSummary> groups) {
  std::vector<const GroupSummary*> eligible;
  for (const auto& g : groups) {
    if (g.n >= 2) eligible.push_back(&g);
  }
  if (eligible.size() < 2) return std::nullopt;

  const auto k = static_cast<double>(eligible.size());
  std::vector<double> w;
  w.reserve(eligible.size());
  double w_sum = 0.0;
  for (const auto* g : eligible) {
    w.push_back(static_cast<double>(g->n) / std::max(g->variance, kVarianceFloor));
    w_sum += w.back();
  }
  double weighted_mean = 0.0;
  for (std::size_t i = 0; i < eligible.size(); ++i) weighted_mean += w[i] * eligible[i]->mean;
  weighted_mean /= w_sum;

  double between = 0.0;
  double lambda = 0.0;
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    const double d = eligible[i]->mean - weighted_mean;
    between += w[i] * d * d;
    const double r = 1.0 - w[i] / w_sum;
    lambda += r * r / static_cast<double>(eligible[i]->n - 1);
  }

  WelchResult out;
  out.df_num = k - 1.0;
  out.f = between / ((k - 1.0) * (1.0 + 2.0 * (k - 2.0) / (k * k - 1.0) * lambda));
  out.df_den = (k * k - 1.0) / (3.0 * lambda);
  out.p_value = special::f_upper_tail(out.f, out.df_num, out.df_den);
  return out;
}

PairwiseResult games_howell_pair(const GroupSummary& a, const GroupSummary& b, double multiplier) {
  if (a.n < 2 || b.n < 2) {
    throw InvalidArgument("Games-Howell needs at least two observations per group");
  }
  PairwiseResult r;
  r.label_i = a.label;
  r.label_j = b.label;
  const double va = a.variance / static_cast<double>(a.n);
  const double vb = b.variance / static_cast<double>(b.n);
  const double se2 = va + vb;
  const double diff = a.mean - b.mean;
  if (!(se2 > 0.0)) {
    // Degenerate: both groups constant.
    r.df = static_cast<double>(a.n + b.n - 2);
    if (diff == 0.0) {
      r.t = 0.0;
      r.p_value = 1.0;
    } else {
      r.t = diff > 0.0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    return r;
  }
  r.t = diff / std::sqrt(se2);
  r.df = se2 * se2 / (va * va / static_cast<double>(a.n - 1) + vb * vb / static_cast<double>(b.n - 1));
  r.p_value = std::min(1.0, multiplier * special::student_t_two_sided(r.t, r.df));
  return r;
}

std::vector<PairwiseResult> games_howell(std::span<const GroupSummary> groups,
                                         Correction correction) {
  const std::size_t k = groups.size();
  const double multiplier =
      correction == Correction::bonferroni ? static_cast<double>(k * (k - 1) / 2) : 1.0;
  std::vector<PairwiseResult> out;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      out.push_back(games_howell_pair(groups[i], groups[j], std::max(multiplier, 1.0)));
    }
  }
  return out;
}

std::vector<GroupSummary> summarize_groups(std::span<const int> labels,
                                           std::span<const double> values) {
  if (labels.size() != values.size()) {
    throw InvalidArgument("summarize_groups: labels and values differ in length");
  }
  std::map<int, std::vector<double>> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(values[i]);
  std::vector<GroupSummary> out;
  for (const auto& [label, vals] : by_label) out.push_back(GroupSummary::from_values(label, vals));
  return out;
}

ClusterSelection select_clusters(const ObservationSet& obs, const CandidatePool& pool,
                                 double p_threshold, Correction correction) {
  if (!pool.has_clusters()) throw InvalidArgument("select_clusters: pool has no cluster labels");
  std::vector<std::vector<double>> values(pool.cluster_count());
  for (const auto& o : obs) {
    values[static_cast<std::size_t>(pool.cluster_of(o.candidate_id))].push_back(o.y);
  }
  return select_groups(values, p_threshold, correction);
}

ClusterSelection select_groups(const std::vector<std::vector<double>>& values, double p_threshold,
                               Correction correction) {
  if (!(p_threshold >= 0.0 && p_threshold <= 1.0)) {
    throw InvalidArgument("select_clusters: p threshold must lie in [0, 1]");
  }
  ClusterSelection out;
  for (std::size_t c = 0; c < values.size(); ++c) out.retained.push_back(static_cast<int>(c));
  if (p_threshold == 0.0) return out;

  std::vector<GroupSummary> eligible;
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (values[c].size() >= 2) {
      eligible.push_back(GroupSummary::from_values(static_cast<int>(c), values[c]));
    }
  }
  out.welch = welch_anova(eligible);
  if (!out.welch || out.welch->p_value >= p_threshold) return out;

  std::size_t best = 0;
  for (std::size_t i = 1; i < eligible.size(); ++i) {
    if (eligible[i].mean > eligible[best].mean) best = i;
  }
  out.best_label = eligible[best].label;
  const std::size_t k = eligible.size();
  const double multiplier =
      correction == Correction::bonferroni ? static_cast<double>(k * (k - 1) / 2) : 1.0;
  std::vector<bool> drop(values.size(), false);
  for (std::size_t j = 0; j < eligible.size(); ++j) {
    if (j == best) continue;
    const auto cmp = games_howell_pair(eligible[best], eligible[j], multiplier);
    out.comparisons.push_back(cmp);
    if (eligible[j].mean < eligible[best].mean && cmp.p_value < p_threshold) {
      drop[static_cast<std::size_t>(eligible[j].label)] = true;
    }
  }
  out.retained.clear();
  for (std::size_t c = 0; c < drop.size(); ++c) {
    (drop[c] ? out.excluded : out.retained).push_back(static_cast<int>(c));
  }
  return out;
}

}  // namespace lftree
