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

#include <chrono>
#include <cstdio>

#include <json.hpp>

#include "lftree/aftree.hpp"
#include "lftree/bench.hpp"
#include "lftree/error.hpp"
#include "lftree/io.hpp"
#include "lftree/runner.hpp"
#include "lftree/stats.hpp"

namespace lftree {

using nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

ordered_json tree_json(const AcquisitionTree& tree) {
  ordered_json nodes = ordered_json::array();
  for (const auto& s : tree.summary()) {
    if (s.visits == 0) continue;
    ordered_json node = {{"k", s.index}, {"n", s.visits}, {"mean", s.mean}, {"var", s.variance}, {"fitted", s.fitted}};
    node["tau"] = s.fitted ? ordered_json(s.threshold) : ordered_json(nullptr);
    nodes.push_back(std::move(node));
  }
  return nodes;
}

}  // namespace

CandidatePool build_pool(const RunConfig& cfg) {
  if (cfg.pool.kind == PoolKind::levy) return make_levy_pool(cfg.pool.levy_spec());
  return load_pool(cfg.pool.path, cfg.pool.sense);
}

ClusterAssignment obtain_clusters(const RunConfig& cfg, const CandidatePool& pool) {
  ClusterAssignment out;
  switch (cfg.clustering.kind) {
    case ClusteringKind::none:
      return out;
    case ClusteringKind::kmeans: {
      RngHandle rng(cfg.seed, "clustering.kmeans");
      return kmeans_cluster(pool, cfg.clustering.clusters, rng, cfg.clustering.max_iters).assignment;
    }
    case ClusteringKind::llm:
    case ClusteringKind::file:
      out.source = cfg.clustering.kind == ClusteringKind::llm ? ClusterSource::llm : ClusterSource::file;
      out.labels = read_label_file(cfg.clustering.labels, pool.size());
      for (const int label : out.labels) {
        out.cluster_count = std::max(out.cluster_count, static_cast<std::size_t>(label) + 1);
      }
      return out;
  }
  return out;
}

LfboStep lfbo_step(const CandidatePool& pool, const ObservationSet& obs, const ClassifierParams& meta,
                   const TreeConfig& cfg, RngHandle& round_rng, std::span<const CandidateId> candidates) {
  if (obs.empty()) throw InvalidArgument("lfbo_step: no observations");
  std::vector<LabeledPoint> points;
  std::vector<double> ys;
  for (const auto& o : obs) {
    points.push_back({pool.features(o.candidate_id), o.y});
    ys.push_back(o.y);
  }
  const double tau = quantile_threshold(ys, cfg.train.gamma);
  RngHandle node_rng = round_rng.derive("node-0");
  LfboStep step;
  step.params = train(meta, points, UtilitySpec{cfg.utility, tau}, cfg.train, node_rng);
  step.meta = reptile_update(meta, step.params, cfg.meta_rate);
  step.pick = argmax_acquisition(step.params, pool, candidates);
  step.threshold = tau;
  double sum = 0.0;
  for (double y : ys) sum += y;
  step.mean = sum / static_cast<double>(ys.size());
  double ss = 0.0;
  for (double y : ys) ss += (y - step.mean) * (y - step.mean);
  step.variance = ss / static_cast<double>(ys.size());
  return step;
}

RunResult run(const RunConfig& cfg) { return run(cfg, build_pool(cfg)); }

RunResult run(const RunConfig& cfg, const CandidatePool& base_pool) {
  cfg.validate();
  const auto run_start = Clock::now();
  const ClusterAssignment clusters = obtain_clusters(cfg, base_pool);
  const CandidatePool pool = clusters.labels.empty() ? base_pool.without_clusters()
                                                     : base_pool.with_clusters(clusters.labels);
  TreeConfig tree_cfg = cfg.tree;
  if (cfg.policy == Policy::lfbo_root) tree_cfg.max_depth = 0;

  RngHandle init_rng(cfg.seed, "init");
  ObservationSet obs = stratified_init(pool, cfg.n_init, init_rng);
  RngHandle meta_rng(cfg.seed, "meta-init");
  ClassifierParams meta = ClassifierParams::random(pool.dim(), meta_rng);
  RngHandle loop_rng(cfg.seed, "run");
  RngHandle random_rng(cfg.seed, "policy.random");

  const double y_star = pool.optimum_internal();
  const double y0 = obs.best_value();

  RunResult result;
  ordered_json header = {{"type", "header"},
                         {"format", "lftree.trace"},
                         {"format_version", 1},
                         {"code_version", LFTREE_VERSION_STRING},
                         {"config", ordered_json::parse(cfg.to_json())},
                         {"pool", {{"size", pool.size()}, {"dim", pool.dim()}, {"digest", hex64(pool.digest())}}},
                         {"sense", to_string(pool.sense())},
                         {"clusters", pool.cluster_count()},
                         {"y_star", pool.to_native(y_star)},
                         {"y0", pool.to_native(y0)}};
  ordered_json init = ordered_json::array();
  for (const auto& o : obs) {
    result.init_ids.push_back(o.candidate_id);
    init.push_back({{"id", o.candidate_id}, {"y", pool.candidate(o.candidate_id).oracle_value}});
  }
  header["init"] = std::move(init);
  result.trace = header.dump() + "\n";

  ordered_json timings = ordered_json::array();
  std::vector<double> queried;
  double best = y0;

  for (std::size_t t = 1; t <= cfg.budget; ++t) {
    if (obs.size() >= pool.size()) {
      result.exhausted = true;
      break;
    }
    RngHandle round_rng = loop_rng.derive("round-" + std::to_string(t));
    ordered_json record = {{"type", "iteration"}, {"t", t}};

    const auto build_start = Clock::now();
    CandidateMask retained(pool.size(), true);
    ordered_json retained_json = nullptr;
    ordered_json welch_json = nullptr;
    if (pool.has_clusters()) {
      std::vector<int> kept;
      if (cfg.policy == Policy::llmat) {
        const auto sel = select_clusters(obs, pool, cfg.p_threshold, cfg.correction);
        kept = sel.retained;
        if (sel.welch) welch_json = sel.welch->p_value;
      } else {
        for (std::size_t c = 0; c < pool.cluster_count(); ++c) kept.push_back(static_cast<int>(c));
      }
      std::vector<bool> keep_label(pool.cluster_count(), false);
      for (const int c : kept) keep_label[static_cast<std::size_t>(c)] = true;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        retained[i] = keep_label[static_cast<std::size_t>(pool.cluster_of(i))];
      }
      retained_json = kept;
    }

    CandidateId pick = 0;
    ordered_json tree_summary = ordered_json::array();
    ordered_json path_json = ordered_json::array();
    ordered_json node_json = nullptr;
    ordered_json acq_json = nullptr;
    bool fallback = false;
    double build_seconds = 0.0;

    if (cfg.policy == Policy::random) {
      build_seconds = seconds_since(build_start);
      const auto ids = unobserved_candidates(pool, obs);
      pick = ids[random_rng.below(ids.size())];
    } else {
      std::optional<SelectionResult> selected;
      if (cfg.policy == Policy::llmat) {
        const AcquisitionTree tree = build_tree(pool, obs, meta, tree_cfg, round_rng);
        meta = tree.meta();
        tree_summary = tree_json(tree);
        build_seconds = seconds_since(build_start);
        const auto path = select_path(tree, cfg.score);
        if (!path.empty()) selected = select_candidate(tree, path, pool, obs, retained);
      }
      if (selected) {
        pick = selected->candidate_id;
        path_json = selected->path;
        node_json = selected->selected_node;
        acq_json = selected->acquisition_value;
      } else {
        fallback = cfg.policy == Policy::llmat;
        auto ids = unobserved_candidates(pool, obs, &retained);
        if (ids.empty()) ids = unobserved_candidates(pool, obs);
        const auto step = lfbo_step(pool, obs, meta, tree_cfg, round_rng, ids);
        if (cfg.policy == Policy::lfbo_root) {
          build_seconds = seconds_since(build_start);
          tree_summary.push_back({{"k", 0},
                                  {"n", obs.size()},
                                  {"mean", step.mean},
                                  {"var", step.variance},
                                  {"fitted", true},
                                  {"tau", step.threshold}});
        }
        meta = step.meta;
        pick = step.pick.id;
        path_json = {0};
        node_json = 0;
        acq_json = step.pick.acquisition_value;
      }
    }
    const double select_seconds = seconds_since(build_start) - build_seconds;

    const double y = oracle_query(pool, pick);
    obs.add(pick, y);
    queried.push_back(y);
    best = std::max(best, y);
    result.selections.push_back(pick);

    record["retained"] = retained_json;
    record["welch_p"] = welch_json;
    record["tree"] = std::move(tree_summary);
    record["path"] = std::move(path_json);
    record["selected_node"] = node_json;
    record["fallback"] = fallback;
    record["id"] = pick;
    record["y"] = pool.candidate(pick).oracle_value;
    record["best"] = pool.to_native(best);
    record["gap"] = gap(best, y0, y_star);
    record["regret"] = avg_regret(queried, y_star);
    record["acquisition"] = acq_json;
    result.trace += record.dump() + "\n";
    timings.push_back({{"t", t}, {"build_seconds", build_seconds}, {"select_seconds", select_seconds}});
  }

  result.metrics = MetricSeries::from_queries(y_star, y0, queried);
  result.best_native = pool.to_native(best);
  ordered_json footer = {{"type", "footer"},
                         {"iterations", result.selections.size()},
                         {"queries", obs.size()},
                         {"exhausted", result.exhausted},
                         {"best", result.best_native}};
  result.trace += footer.dump() + "\n";
  ordered_json timing = {{"iterations", std::move(timings)}, {"total_seconds", seconds_since(run_start)}};
  result.timing = timing.dump(2) + "\n";
  return result;
}

void write_run_outputs(const RunResult& result, const std::filesystem::path& trace_path,
                       const std::filesystem::path& timing_path) {
  write_file(trace_path, result.trace);
  if (!timing_path.empty()) write_file(timing_path, result.timing);
}

}  // namespace lftree
