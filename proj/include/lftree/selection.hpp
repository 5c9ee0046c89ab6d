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

#ifndef LFTREE_SELECTION_HPP
#define LFTREE_SELECTION_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lftree/aftree.hpp"
#include "lftree/core.hpp"

namespace lftree {

/// Candidate membership flags indexed by candidate id.
using CandidateMask = std::vector<bool>;

enum class ScoreKind { UCT, VAR };

std::string to_string(ScoreKind kind);
ScoreKind parse_score_kind(const std::string& text);

struct ScoreSpec {
  ScoreKind kind = ScoreKind::UCT;
  double lambda = 0.5;

  void validate() const;
};

struct SelectionResult {
  std::vector<std::size_t> path;  // root to deepest fitted node on the descent
  std::size_t selected_node = 0;
  CandidateId candidate_id = 0;
  double acquisition_value = 0.0;
};

/// Partition score of node k from its visit statistics.
///
///   UCT: mean + 2 lambda sqrt(2 ln n_parent / n_k)
///   VAR: mean + 2 lambda sqrt(variance)
///
/// Unvisited nodes score +infinity. UCT is undefined at the root.
double node_score(const AcquisitionTree& tree, std::size_t k, const ScoreSpec& spec);

/// Descends from the root through fitted nodes, always moving to the child
/// with the larger score (ties go to 2k+1). Empty when the root is unfitted.
std::vector<std::size_t> select_path(const AcquisitionTree& tree, const ScoreSpec& spec);

/// Walks the path from its deepest node back to the root and stops at the
/// first node whose region holds retained, unobserved candidates; region
/// membership is decided by routing each such candidate down the path. The
/// candidate with the largest node acquisition wins (lowest id on ties).
/// When no retained candidate is unobserved, every unobserved candidate is
/// scored at the root. Throws ExhaustedError when nothing is left.
SelectionResult select_candidate(const AcquisitionTree& tree, std::span<const std::size_t> path,
                                 const CandidatePool& pool, const ObservationSet& obs,
                                 const CandidateMask& retained);

struct ScoredCandidate {
  CandidateId id = 0;
  double acquisition_value = 0.0;
};

/// Largest acquisition under `params` among `candidates`; ties go to the
/// lowest id. `candidates` must be non-empty.
ScoredCandidate argmax_acquisition(const ClassifierParams& params, const CandidatePool& pool,
                                   std::span<const CandidateId> candidates);

/// Unobserved ids in ascending order, optionally restricted to a mask.
std::vector<CandidateId> unobserved_candidates(const CandidatePool& pool, const ObservationSet& obs,
                                               const CandidateMask* restrict_to = nullptr);

}  // namespace lftree

#endif  // LFTREE_SELECTION_HPP
