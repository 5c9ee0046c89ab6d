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

#ifndef LFTREE_AFTREE_HPP
#define LFTREE_AFTREE_HPP

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "lftree/classifier.hpp"
#include "lftree/core.hpp"
#include "lftree/rng.hpp"

namespace lftree {

struct TreeConfig {
  TrainConfig train;
  std::size_t max_depth = 2;  // nodes live at depths 0..max_depth
  std::size_t min_leaf = 2;
  double meta_rate = 0.01;    // Reptile step size, in [0, 1]
  UtilityKind utility = UtilityKind::EI;

  void validate() const;
};

/// One node of the acquisition tree in heap layout (children 2k+1, 2k+2).
struct TreeNode {
  std::size_t index = 0;
  std::vector<CandidateId> observed_ids;  // observations routed to this node
  double mean = 0.0;                      // of observed y, 0 when empty
  double variance = 0.0;                  // population variance of observed y
  double threshold = std::numeric_limits<double>::quiet_NaN();
  bool fitted = false;
  ClassifierParams params;  // meaningful only when fitted

  [[nodiscard]] std::size_t visits() const { return observed_ids.size(); }
};

/// Per-node record emitted into run traces.
struct NodeSummary {
  std::size_t index = 0;
  std::size_t visits = 0;
  double mean = 0.0;
  double variance = 0.0;
  double threshold = 0.0;
  bool fitted = false;
};

/// Binary tree over the candidate pool whose fitted nodes carry a classifier
/// that both splits the node and scores its candidates.
///
/// A node at depth < max_depth that is fitted routes its observations into
/// both children. Fitted nodes at max_depth serve as local acquisition
/// functions only and have no children.
class AcquisitionTree {
 public:
  AcquisitionTree(std::size_t max_depth, std::size_t min_leaf, std::vector<TreeNode> nodes,
                  ClassifierParams meta);

  [[nodiscard]] std::size_t max_depth() const { return max_depth_; }
  [[nodiscard]] std::size_t min_leaf() const { return min_leaf_; }
  [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }
  [[nodiscard]] const TreeNode& node(std::size_t k) const;
  [[nodiscard]] const std::vector<TreeNode>& nodes() const { return nodes_; }
  [[nodiscard]] bool contains(std::size_t k) const { return k < nodes_.size(); }
  [[nodiscard]] bool is_fitted(std::size_t k) const { return contains(k) && nodes_[k].fitted; }
  [[nodiscard]] bool has_children(std::size_t k) const { return depth_of(k) < max_depth_; }

  /// Fitted node indices in ascending order.
  [[nodiscard]] std::vector<std::size_t> fitted_nodes() const;
  /// Meta parameters after all Reptile updates of this build.
  [[nodiscard]] const ClassifierParams& meta() const { return meta_; }

  [[nodiscard]] std::vector<NodeSummary> summary() const;

  static std::size_t depth_of(std::size_t k);
  static std::size_t capacity(std::size_t max_depth) { return (std::size_t{2} << max_depth) - 1; }
  static std::size_t parent_of(std::size_t k) { return (k + 1) / 2 - 1; }

 private:
  std::size_t max_depth_;
  std::size_t min_leaf_;
  std::vector<TreeNode> nodes_;
  ClassifierParams meta_;
};

/// Fits the tree for the current observations.
///
/// Visits nodes in index order. A node with at least min_leaf observations
/// that is splitable at its gamma threshold gets a classifier trained from a
/// copy of the running meta parameters; the meta parameters then move toward
/// it by meta_rate, and the node's observations are routed to the children.
AcquisitionTree build_tree(const CandidatePool& pool, const ObservationSet& obs,
                           const ClassifierParams& meta, const TreeConfig& cfg, RngHandle& rng);

/// Both classes of 1(y > tau) present and at least 2m points.
bool is_splitable(std::span<const LabeledPoint> points, double threshold, std::size_t min_leaf);

/// 2k+1 when the node's classifier gives pi > 0.5, else 2k+2.
std::size_t route(const AcquisitionTree& tree, std::size_t k, std::span<const double> features);

/// Acquisition value of `features` under node k's classifier.
double node_acquisition(const AcquisitionTree& tree, std::size_t k,
                        std::span<const double> features);

/// meta + eta * (local - meta), exact at eta = 0 and eta = 1.
ClassifierParams reptile_update(const ClassifierParams& meta, const ClassifierParams& local,
                                double eta);

}  // namespace lftree

#endif  // LFTREE_AFTREE_HPP
