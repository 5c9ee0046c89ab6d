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
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "lftree/core.hpp"
#include "lftree/error.hpp"
#include "lftree/io.hpp"
#include "lftree/metrics.hpp"

namespace lftree {

namespace {

// Linear interpolation between order statistics.
double quantile(std::vector<double> sorted, double q) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Band summarize(const std::vector<std::vector<double>>& series, CenterKind center) {
  Band band;
  const std::size_t horizon = series.front().size();
  std::vector<double> column(series.size());
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t r = 0; r < series.size(); ++r) column[r] = series[r][t];
    const double n = static_cast<double>(column.size());
    const double mean = std::accumulate(column.begin(), column.end(), 0.0) / n;
    double ss = 0.0;
    for (const double v : column) ss += (v - mean) * (v - mean);
    band.center.push_back(center == CenterKind::mean ? mean : quantile(column, 0.5));
    band.min.push_back(*std::min_element(column.begin(), column.end()));
    band.max.push_back(*std::max_element(column.begin(), column.end()));
    band.q25.push_back(quantile(column, 0.25));
    band.q75.push_back(quantile(column, 0.75));
    band.sem.push_back(column.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0);
  }
  return band;
}

}  // namespace

double gap(double y_star_t, double y0, double y_star) {
  if (y_star == y0) return 1.0;
  return (y_star_t - y0) / (y_star - y0);
}

double avg_regret(std::span<const double> ys, double y_star) {
  if (ys.empty()) throw InvalidArgument("average regret of an empty query list");
  double total = 0.0;
  for (const double y : ys) total += y_star - y;
  return total / static_cast<double>(ys.size());
}

MetricSeries MetricSeries::from_queries(double y_star, double y0, std::span<const double> ys) {
  MetricSeries s;
  s.y_star = y_star;
  s.y0 = y0;
  double best = y0;
  double shortfall = 0.0;
  for (std::size_t t = 0; t < ys.size(); ++t) {
    best = std::max(best, ys[t]);
    shortfall += y_star - ys[t];
    s.best.push_back(best);
    s.gap.push_back(lftree::gap(best, y0, y_star));
    s.regret.push_back(shortfall / static_cast<double>(t + 1));
  }
  return s;
}

MetricSeries read_trace_metrics(const std::filesystem::path& trace_path) {
  using nlohmann::json;
  const std::string content = read_file(trace_path);
  std::optional<ObjectiveSense> sense;
  double y_star = 0.0;
  double y0 = 0.0;
  std::vector<double> ys;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    const std::string line = content.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto rec = json::parse(line);
      const auto type = rec.at("type").get<std::string>();
      if (type == "header") {
        sense = parse_objective_sense(rec.at("sense").get<std::string>());
        y_star = rec.at("y_star").get<double>();
        y0 = rec.at("y0").get<double>();
      } else if (type == "iteration") {
        if (!sense) throw IngestionError("iteration before header");
        ys.push_back(rec.at("y").get<double>());
      }
    } catch (const json::exception& e) {
      throw IngestionError(trace_path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    } catch (const IngestionError& e) {
      throw IngestionError(trace_path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!sense) throw IngestionError(trace_path.string() + ": no header record");
  const double flip = *sense == ObjectiveSense::minimize ? -1.0 : 1.0;
  for (auto& y : ys) y *= flip;
  return MetricSeries::from_queries(flip * y_star, flip * y0, ys);
}

std::string to_string(CenterKind kind) { return kind == CenterKind::mean ? "mean" : "median"; }

CenterKind parse_center_kind(const std::string& text) {
  if (text == "mean") return CenterKind::mean;
  if (text == "median") return CenterKind::median;
  throw InvalidArgument("unknown center '" + text + "' (expected mean or median)");
}

AggregateSummary aggregate(const std::vector<MetricSeries>& runs, CenterKind center, bool normalize) {
  if (runs.empty()) throw InvalidArgument("aggregate of zero runs");
  const std::size_t horizon = runs.front().horizon();
  if (horizon == 0) throw InvalidArgument("aggregate of runs without iterations");
  std::vector<std::vector<double>> gaps;
  std::vector<std::vector<double>> regrets;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& run = runs[r];
    if (run.horizon() != horizon || run.regret.size() != horizon) {
      throw InvalidArgument("run " + std::to_string(r) + " has horizon " + std::to_string(run.horizon()) +
                            ", expected " + std::to_string(horizon));
    }
    gaps.push_back(run.gap);
    auto regret = run.regret;
    const double span = run.y_star - run.y0;
    if (normalize && span != 0.0) {
      for (auto& v : regret) v /= span;
    }
    regrets.push_back(std::move(regret));
  }
  AggregateSummary summary;
  summary.runs = runs.size();
  summary.center = center;
  summary.normalized = normalize;
  summary.gap = summarize(gaps, center);
  summary.regret = summarize(regrets, center);
  return summary;
}

std::string AggregateSummary::to_csv() const {
  std::string out = "t,runs";
  for (const char* metric : {"gap", "regret"}) {
    for (const char* col : {"center", "min", "max", "q25", "q75", "sem"}) {
      out += std::string(",") + metric + "_" + col;
    }
  }
  out += "\n";
  for (std::size_t t = 0; t < horizon(); ++t) {
    out += std::to_string(t + 1) + "," + std::to_string(runs);
    for (const Band* band : {&gap, &regret}) {
      for (const auto* col : {&band->center, &band->min, &band->max, &band->q25, &band->q75, &band->sem}) {
        out += "," + format_double((*col)[t]);
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace lftree
