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

#ifndef LFTREE_CORE_HPP
#define LFTREE_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "lftree/rng.hpp"

namespace lftree {

using CandidateId = std::size_t;

enum class ObjectiveSense { maximize, minimize };

std::string to_string(ObjectiveSense sense);
ObjectiveSense parse_objective_sense(const std::string& text);

struct Candidate {
  CandidateId id = 0;
  std::optional<std::string> text;
  std::vector<double> features;  // raw, as ingested
  double oracle_value = 0.0;     // native orientation
  std::optional<int> cluster;
};

struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation
};

/// Immutable, densely indexed candidate set.
///
/// Oracle values are kept in the file's native orientation and exposed to the
/// optimizer in maximization orientation (negated for minimization tasks).
/// Features are z-scored per dimension with statistics computed once from the
/// whole pool; zero-variance dimensions map to zero.
class CandidatePool {
 public:
  /// Validates and standardizes. Candidates may come in any order but their
  /// ids must form exactly 0..N-1.
  CandidatePool(std::vector<Candidate> candidates, ObjectiveSense sense);

  [[nodiscard]] std::size_t size() const { return data_->candidates.size(); }
  [[nodiscard]] std::size_t dim() const { return data_->dim; }
  [[nodiscard]] ObjectiveSense sense() const { return data_->sense; }

  [[nodiscard]] const Candidate& candidate(CandidateId id) const;
  [[nodiscard]] const std::vector<Candidate>& candidates() const { return data_->candidates; }

  /// Standardized feature row.
  [[nodiscard]] std::span<const double> features(CandidateId id) const;
  [[nodiscard]] const FeatureStats& feature_stats() const { return data_->stats; }

  /// Oracle value in maximization orientation.
  [[nodiscard]] double internal_value(CandidateId id) const;
  [[nodiscard]] double to_native(double internal) const;
  [[nodiscard]] double to_internal(double native) const { return to_native(native); }

  /// Largest internal oracle value in the pool.
  [[nodiscard]] double optimum_internal() const { return data_->optimum; }

  [[nodiscard]] bool has_clusters() const { return data_->cluster_count > 0; }
  /// One past the largest cluster label, or 0 without labels.
  [[nodiscard]] std::size_t cluster_count() const { return data_->cluster_count; }
  [[nodiscard]] int cluster_of(CandidateId id) const;

  /// Copy of the pool with every candidate relabelled.
  [[nodiscard]] CandidatePool with_clusters(const std::vector<int>& labels) const;
  [[nodiscard]] CandidatePool without_clusters() const;

  /// FNV-1a digest over ids, raw features, oracle values, labels and sense.
  [[nodiscard]] std::uint64_t digest() const;

 private:
  struct Data {
    std::vector<Candidate> candidates;
    ObjectiveSense sense = ObjectiveSense::maximize;
    std::size_t dim = 0;
    FeatureStats stats;
    std::vector<double> standardized;  // row-major N x dim
    std::size_t cluster_count = 0;
    double optimum = 0.0;
  };
  std::shared_ptr<const Data> data_;
};

/// Reads a pool from CSV (`id,y[,text][,cluster],f0,...,f{d-1}`) or from a
/// JSON array of objects with the same field names (`.json` extension).
CandidatePool load_pool(const std::filesystem::path& path, ObjectiveSense sense);
CandidatePool parse_pool_csv(const std::string& content, ObjectiveSense sense);
CandidatePool parse_pool_json(const std::string& content, ObjectiveSense sense);

/// Writes the pool in the CSV ingestion format, native orientation, raw
/// features at round-trip precision.
void write_pool_csv(const CandidatePool& pool, const std::filesystem::path& path);
std::string format_pool_csv(const CandidatePool& pool);

/// Internal-orientation oracle value of `id`. Throws InvalidArgument for ids
/// outside the pool.
double oracle_query(const CandidatePool& pool, CandidateId id);

struct Observation {
  CandidateId candidate_id = 0;
  double y = 0.0;  // internal orientation
};

/// The growing observed dataset, in insertion order.
class ObservationSet {
 public:
  void add(CandidateId id, double y);

  [[nodiscard]] bool contains(CandidateId id) const { return ids_.contains(id); }
  [[nodiscard]] std::size_t size() const { return observations_.size(); }
  [[nodiscard]] bool empty() const { return observations_.empty(); }
  [[nodiscard]] const std::vector<Observation>& observations() const { return observations_; }
  [[nodiscard]] const Observation& operator[](std::size_t i) const { return observations_[i]; }
  [[nodiscard]] auto begin() const { return observations_.begin(); }
  [[nodiscard]] auto end() const { return observations_.end(); }

  /// Largest observed y. Throws InvalidArgument when empty.
  [[nodiscard]] double best_value() const;

 private:
  std::vector<Observation> observations_;
  std::unordered_set<CandidateId> ids_;
  double best_ = 0.0;
};

/// Initial design of min(n, N) distinct candidates.
///
/// With cluster labels, draws are allocated round-robin over the non-empty
/// clusters in label order (skipping exhausted clusters) and taken uniformly
/// without replacement inside each cluster. Without labels the draw is
/// uniform over the pool.
ObservationSet stratified_init(const CandidatePool& pool, std::size_t n, RngHandle& rng);

/// Per-cluster draw counts used by stratified_init.
std::vector<std::size_t> allocate_round_robin(const std::vector<std::size_t>& cluster_sizes,
                                              std::size_t n);

}  // namespace lftree

#endif  // LFTREE_CORE_HPP
