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

#include "lftree/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lftree/error.hpp"

namespace lftree {

std::string to_string(ScoreKind kind) { return kind == ScoreKind::UCT ? "UCT" : "VAR"; }

ScoreKind parse_score_kind(const std::string& text) {
  if (text == "UCT" || text == "uct") return ScoreKind::UCT;
  if (text == "VAR" || text == "var") return ScoreKind::VAR;
  throw InvalidArgument("unknown score kind '" + text + "' (expected UCT or VAR)");
}

void ScoreSpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("score lambda must be finite and non-negative");
  }
}

double node_score(const AcquisitionTree& tree, std::size_t k, const ScoreSpec& spec) {
  spec.validate();
  const TreeNode& node = tree.node(k);
  if (node.visits() == 0) return std::numeric_limits<double>::infinity();
  if (spec.kind == ScoreKind::VAR) {
    return node.mean + 2.0 * spec.lambda * std::sqrt(node.variance);
  }
  if (k == 0) throw InvalidArgument("UCT score is undefined for the root");
  const auto n_parent = static_cast<double>(tree.node(AcquisitionTree::parent_of(k)).visits());
  const auto n_k = static_cast<double>(node.visits());
  return node.mean + 2.0 * spec.lambda * std::sqrt(2.0 * std::log(n_parent) / n_k);
}

std::vector<std::size_t> select_path(const AcquisitionTree& tree, const ScoreSpec& spec) {
  std::vector<std::size_t> path;
  std::size_t k = 0;
  while (tree.is_fitted(k)) {
    path.push_back(k);
    if (!tree.has_children(k)) break;
    const std::size_t left = 2 * k + 1;
    const std::size_t right = 2 * k + 2;
    k = node_score(tree, right, spec) > node_score(tree, left, spec) ? right : left;
  }
  return path;
}

std::vector<CandidateId> unobserved_candidates(const CandidatePool& pool, const ObservationSet& obs,
                                               const CandidateMask* restrict_to) {
  if (restrict_to != nullptr && restrict_to->size() != pool.size()) {
    throw InvalidArgument("candidate mask size does not match the pool");
  }
  std::vector<CandidateId> out;
  for (CandidateId id = 0; id < pool.size(); ++id) {
    if (obs.contains(id)) continue;
    if (restrict_to != nullptr && !(*restrict_to)[id]) continue;
    out.push_back(id);
  }
  return out;
}

ScoredCandidate argmax_acquisition(const ClassifierParams& params, const CandidatePool& pool,
                                   std::span<const CandidateId> candidates) {
  if (candidates.empty()) throw InvalidArgument("argmax_acquisition: no candidates");
  ScoredCandidate best{0, -std::numeric_limits<double>::infinity()};
  bool first = true;
  for (CandidateId id : candidates) {
    const double value = acquisition(params, pool.features(id));
    if (first || value > best.acquisition_value ||
        (value == best.acquisition_value && id < best.id)) {
      best = {id, value};
      first = false;
    }
  }
  return best;
}

SelectionResult select_candidate(const AcquisitionTree& tree, std::span<const std::size_t> path,
                                 const CandidatePool& pool, const ObservationSet& obs,
                                 const CandidateMask& retained) {
  if (path.empty()) throw InvalidArgument("select_candidate: empty path");
  if (path.front() != 0) throw InvalidArgument("select_candidate: path must start at the root");
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!tree.is_fitted(path[i])) {
      throw InvalidArgument("select_candidate: path node " + std::to_string(path[i]) +
                            " is not fitted");
    }
    if (i > 0 && AcquisitionTree::parent_of(path[i]) != path[i - 1]) {
      throw InvalidArgument("select_candidate: path is not a root-to-leaf chain");
    }
  }

  SelectionResult result;
  result.path.assign(path.begin(), path.end());

  const auto open = unobserved_candidates(pool, obs, &retained);
  std::vector<CandidateId> chosen;
  if (!open.empty()) {
    // Depth along the path that each candidate reaches by routing.
    std::vector<std::size_t> reach(open.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t c = 0; c < open.size(); ++c) {
      const auto x = pool.features(open[c]);
      std::size_t depth = 0;
      while (depth + 1 < path.size() && route(tree, path[depth], x) == path[depth + 1]) ++depth;
      reach[c] = depth;
      deepest = std::max(deepest, depth);
    }
    for (std::size_t c = 0; c < open.size(); ++c) {
      if (reach[c] >= deepest) chosen.push_back(open[c]);
    }
    result.selected_node = path[deepest];
  } else {
    chosen = unobserved_candidates(pool, obs);
    if (chosen.empty()) throw ExhaustedError("every candidate in the pool has been observed");
    result.selected_node = path.front();
  }

  const auto best = argmax_acquisition(tree.node(result.selected_node).params, pool, chosen);
  result.candidate_id = best.id;
  result.acquisition_value = best.acquisition_value;
  return result;
}

}  // namespace lftree
