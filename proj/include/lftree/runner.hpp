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

#ifndef LFTREE_RUNNER_HPP
#define LFTREE_RUNNER_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "lftree/classifier.hpp"
#include "lftree/clustering.hpp"
#include "lftree/config.hpp"
#include "lftree/core.hpp"
#include "lftree/metrics.hpp"
#include "lftree/selection.hpp"

namespace lftree {

struct RunResult {
  std::vector<CandidateId> init_ids;
  std::vector<CandidateId> selections;  // one per completed iteration
  MetricSeries metrics;                 // internal orientation
  bool exhausted = false;               // pool ran out before the budget
  double best_native = 0.0;
  std::string trace;   // JSON lines: header, one record per iteration, footer
  std::string timing;  // JSON document with per-iteration wall-clock seconds

  [[nodiscard]] std::size_t iterations() const { return selections.size(); }
};

/// Pool named by the configuration, without cluster labels applied.
CandidatePool build_pool(const RunConfig& cfg);

/// Cluster labels for `pool` per the configuration. LLM labels are read from
/// the label cache only; this never touches the network. Returns an empty
/// assignment for clustering "none".
ClusterAssignment obtain_clusters(const RunConfig& cfg, const CandidatePool& pool);

/// Full optimization run. Identical configurations give identical traces.
RunResult run(const RunConfig& cfg);
/// Same, on a prebuilt pool; labels are still obtained per the configuration.
RunResult run(const RunConfig& cfg, const CandidatePool& pool);

void write_run_outputs(const RunResult& result, const std::filesystem::path& trace_path,
                       const std::filesystem::path& timing_path);

struct LfboStep {
  ClassifierParams params;  // classifier fitted on every observation
  ClassifierParams meta;    // meta parameters after the Reptile step
  ScoredCandidate pick;
  double threshold = 0.0;  // gamma quantile of the observed values
  double mean = 0.0;       // of the observed values
  double variance = 0.0;   // population variance of the observed values
};

/// One round of plain LFBO: fit a classifier from `meta` on all
/// observations, move `meta` toward it and return the best of `candidates`.
LfboStep lfbo_step(const CandidatePool& pool, const ObservationSet& obs, const ClassifierParams& meta,
                   const TreeConfig& cfg, RngHandle& round_rng, std::span<const CandidateId> candidates);

}  // namespace lftree

#endif  // LFTREE_RUNNER_HPP
