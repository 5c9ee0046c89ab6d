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

#include "lftree/aftree.hpp"

#include <cmath>
#include <unordered_map>

#include "lftree/error.hpp"

namespace lftree {
namespace {

void fill_statistics(TreeNode& node, const std::unordered_map<CandidateId, double>& values) {
  const std::size_t n = node.observed_ids.size();
  if (n == 0) {
    node.mean = 0.0;
    node.variance = 0.0;
    return;
  }
  double sum = 0.0;
  for (CandidateId id : node.observed_ids) sum += values.at(id);
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (CandidateId id : node.observed_ids) {
    const double d = values.at(id) - mean;
    ss += d * d;
  }
  node.mean = mean;
  node.variance = ss / static_cast<double>(n);
}

const TreeNode& fitted_node(const AcquisitionTree& tree, std::size_t k) {
  if (!tree.is_fitted(k)) {
    throw InvalidArgument("node " + std::to_string(k) + " is not fitted");
  }
  return tree.node(k);
}

}  // namespace

void TreeConfig::validate() const {
  train.validate();
  if (min_leaf == 0) throw InvalidArgument("tree config: min leaf size must be positive");
  if (!(meta_rate >= 0.0 && meta_rate <= 1.0)) {
    throw InvalidArgument("tree config: meta learning rate must lie in [0, 1]");
  }
  if (max_depth > 20) throw InvalidArgument("tree config: depth limit too large");
}

AcquisitionTree::AcquisitionTree(std::size_t max_depth, std::size_t min_leaf,
                                 std::vector<TreeNode> nodes, ClassifierParams meta)
    : max_depth_(max_depth), min_leaf_(min_leaf), nodes_(std::move(nodes)), meta_(std::move(meta)) {
  if (nodes_.size() != capacity(max_depth_)) {
    throw InvalidArgument("acquisition tree of depth " + std::to_string(max_depth_) + " needs " +
                          std::to_string(capacity(max_depth_)) + " nodes");
  }
  for (std::size_t k = 0; k < nodes_.size(); ++k) nodes_[k].index = k;
}

const TreeNode& AcquisitionTree::node(std::size_t k) const {
  if (k >= nodes_.size()) {
    throw InvalidArgument("node index " + std::to_string(k) + " outside tree of " +
                          std::to_string(nodes_.size()) + " nodes");
  }
  return nodes_[k];
}

std::vector<std::size_t> AcquisitionTree::fitted_nodes() const {
  std::vector<std::size_t> out;
  for (const auto& n : nodes_) {
    if (n.fitted) out.push_back(n.index);
  }
  return out;
}

std::vector<NodeSummary> AcquisitionTree::summary() const {
  std::vector<NodeSummary> out;
  out.reserve(nodes_.size());
  for (const auto& n : nodes_) {
    out.push_back({n.index, n.visits(), n.mean, n.variance, n.threshold, n.fitted});
  }
  return out;
}

std::size_t AcquisitionTree::depth_of(std::size_t k) {
  std::size_t depth = 0;
  for (std::size_t v = k + 1; v > 1; v >>= 1) ++depth;
  return depth;
}

bool is_splitable(std::span<const LabeledPoint> points, double threshold, std::size_t min_leaf) {
  if (points.size() < 2 * min_leaf) return false;
  bool above = false;
  bool below = false;
  for (const auto& p : points) {
    (p.y > threshold ? above : below) = true;
  }
  return above && below;
}

ClassifierParams reptile_update(const ClassifierParams& meta, const ClassifierParams& local,
                                double eta) {
  if (meta.size() != local.size()) {
    throw InvalidArgument("reptile_update: parameter shapes differ");
  }
  ClassifierParams out = meta;
  auto dst = out.values();
  auto src = local.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::lerp(dst[i], src[i], eta);
  return out;
}

AcquisitionTree build_tree(const CandidatePool& pool, const ObservationSet& obs,
                           const ClassifierParams& meta, const TreeConfig& cfg, RngHandle& rng) {
  cfg.validate();
  if (obs.empty()) throw InvalidArgument("build_tree: no observations");
  if (meta.input_dim() != pool.dim()) {
    throw InvalidArgument("build_tree: meta parameters do not match the pool dimension");
  }

  std::unordered_map<CandidateId, double> values;
  values.reserve(obs.size());
  std::vector<TreeNode> nodes(AcquisitionTree::capacity(cfg.max_depth));
  for (const auto& o : obs) {
    values.emplace(o.candidate_id, o.y);
    nodes[0].observed_ids.push_back(o.candidate_id);
  }

  ClassifierParams running = meta;
  std::vector<LabeledPoint> points;
  std::vector<double> ys;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    TreeNode& node = nodes[k];
    node.index = k;
    fill_statistics(node, values);
    if (node.visits() < cfg.min_leaf) continue;

    points.clear();
    ys.clear();
    for (CandidateId id : node.observed_ids) {
      points.push_back({pool.features(id), values.at(id)});
      ys.push_back(values.at(id));
    }
    node.threshold = quantile_threshold(ys, cfg.train.gamma);
    if (!is_splitable(points, node.threshold, cfg.min_leaf)) continue;

    RngHandle node_rng = rng.derive("node-" + std::to_string(k));
    try {
      node.params = train(running, points, UtilitySpec{cfg.utility, node.threshold}, cfg.train,
                          node_rng);
    } catch (const NumericError& e) {
      throw NumericError("node " + std::to_string(k) + ": " + e.what());
    }
    running = reptile_update(running, node.params, cfg.meta_rate);
    node.fitted = true;

    if (AcquisitionTree::depth_of(k) < cfg.max_depth) {
      for (std::size_t i = 0; i < node.observed_ids.size(); ++i) {
        const std::size_t child =
            predict(node.params, points[i].features) > 0.5 ? 2 * k + 1 : 2 * k + 2;
        nodes[child].observed_ids.push_back(node.observed_ids[i]);
      }
    }
  }
  return AcquisitionTree(cfg.max_depth, cfg.min_leaf, std::move(nodes), std::move(running));
}

std::size_t route(const AcquisitionTree& tree, std::size_t k, std::span<const double> features) {
  const TreeNode& node = fitted_node(tree, k);
  return predict(node.params, features) > 0.5 ? 2 * k + 1 : 2 * k + 2;
}

double node_acquisition(const AcquisitionTree& tree, std::size_t k,
                        std::span<const double> features) {
  return acquisition(fitted_node(tree, k).params, features);
}

}  // namespace lftree
