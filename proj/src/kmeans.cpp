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

#include <algorithm>
#include <limits>

#include "lftree/clustering.hpp"
#include "lftree/error.hpp"

namespace lftree {

namespace {

double squared_distance(std::span<const double> a, const std::vector<double>& b) {
  double total = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double diff = a[j] - b[j];
    total += diff * diff;
  }
  return total;
}

std::vector<double> to_vector(std::span<const double> row) { return {row.begin(), row.end()}; }

}  // namespace

std::string to_string(ClusterSource source) {
  switch (source) {
    case ClusterSource::kmeans:
      return "kmeans";
    case ClusterSource::llm:
      return "llm";
    case ClusterSource::file:
      return "file";
  }
  return "file";
}

KMeansResult kmeans_cluster(const CandidatePool& pool, std::size_t clusters, RngHandle& rng,
                            std::size_t max_iters) {
  const std::size_t n = pool.size();
  if (clusters < 2) throw InvalidArgument("kmeans needs at least 2 clusters");
  if (clusters > n) {
    throw InvalidArgument("kmeans: " + std::to_string(clusters) + " clusters for " +
                          std::to_string(n) + " candidates");
  }
  if (max_iters == 0) throw InvalidArgument("kmeans: max_iters must be positive");

  KMeansResult result;
  auto& centers = result.centers;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

  centers.push_back(to_vector(pool.features(rng.below(n))));
  while (centers.size() < clusters) {
    std::size_t pick = 0;
    double far = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(pool.features(i), centers.back()));
      if (nearest[i] > far) {
        far = nearest[i];
        pick = i;
      }
    }
    centers.push_back(to_vector(pool.features(pick)));
  }

  std::vector<int> labels(n, -1);
  std::vector<double> cost(n, 0.0);
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < clusters; ++c) {
        const double d = squared_distance(pool.features(i), centers[c]);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (labels[i] != best) changed = true;
      labels[i] = best;
      cost[i] = best_d;
      inertia += best_d;
    }
    result.inertia_history.push_back(inertia);
    result.iterations = iter + 1;
    if (!changed) {
      result.converged = true;
      break;
    }

    const std::size_t dim = pool.dim();
    std::vector<std::vector<double>> sums(clusters, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(clusters, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = pool.features(i);
      auto& sum = sums[static_cast<std::size_t>(labels[i])];
      for (std::size_t j = 0; j < dim; ++j) sum[j] += row[j];
      ++counts[static_cast<std::size_t>(labels[i])];
    }
    std::vector<bool> taken(n, false);
    for (std::size_t c = 0; c < clusters; ++c) {
      if (counts[c] > 0) {
        for (std::size_t j = 0; j < dim; ++j) centers[c][j] = sums[c][j] / static_cast<double>(counts[c]);
        continue;
      }
      std::size_t pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        if (pick == n || cost[i] > cost[pick]) pick = i;
      }
      taken[pick] = true;
      centers[c] = to_vector(pool.features(pick));
    }
  }

  result.assignment.source = ClusterSource::kmeans;
  result.assignment.labels = std::move(labels);
  result.assignment.cluster_count = clusters;
  return result;
}

}  // namespace lftree
