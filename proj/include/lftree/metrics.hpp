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

#ifndef LFTREE_METRICS_HPP
#define LFTREE_METRICS_HPP

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace lftree {

/// (y*_t - y0) / (y* - y0); 1 when y* equals y0.
double gap(double y_star_t, double y0, double y_star);

/// Mean shortfall (y* - y_i) of the queried values. Throws on an empty list.
double avg_regret(std::span<const double> ys, double y_star);

/// Per-iteration progress of one run, internal orientation. Entry t-1 holds
/// the state after t optimizer queries; initial-design queries only enter y0.
struct MetricSeries {
  double y_star = 0.0;
  double y0 = 0.0;
  std::vector<double> best;
  std::vector<double> gap;
  std::vector<double> regret;

  static MetricSeries from_queries(double y_star, double y0, std::span<const double> ys);
  [[nodiscard]] std::size_t horizon() const { return gap.size(); }
};

/// Recomputes the metric series from the raw query values of a trace file.
MetricSeries read_trace_metrics(const std::filesystem::path& trace_path);

enum class CenterKind { mean, median };

std::string to_string(CenterKind kind);
CenterKind parse_center_kind(const std::string& text);

struct Band {
  std::vector<double> center;
  std::vector<double> min;
  std::vector<double> max;
  std::vector<double> q25;
  std::vector<double> q75;
  std::vector<double> sem;  // standard error of the mean
};

struct AggregateSummary {
  std::size_t runs = 0;
  CenterKind center = CenterKind::mean;
  bool normalized = false;
  Band gap;
  Band regret;

  [[nodiscard]] std::size_t horizon() const { return gap.center.size(); }
  /// Columns t, runs, then center/min/max/q25/q75/sem for gap and regret.
  [[nodiscard]] std::string to_csv() const;
};

/// Cross-run summary per iteration. With `normalize`, each run's regrets are
/// divided by its own (y* - y0) span first (left as is when the span is 0).
/// Throws on an empty list or unequal horizons.
AggregateSummary aggregate(const std::vector<MetricSeries>& runs, CenterKind center, bool normalize);

}  // namespace lftree

#endif  // LFTREE_METRICS_HPP
