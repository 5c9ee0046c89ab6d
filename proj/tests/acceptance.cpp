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

// Acceptance suite: one PASS or FAIL line per criterion.
// Usage: acceptance [--cli <path to lftree>]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lftree/aftree.hpp"
#include "lftree/bench.hpp"
#include "lftree/classifier.hpp"
#include "lftree/clustering.hpp"
#include "lftree/error.hpp"
#include "lftree/metrics.hpp"
#include "lftree/runner.hpp"
#include "lftree/selection.hpp"
#include "lftree/stats.hpp"
#include "mock_llm.hpp"
#include "oracles.hpp"

using namespace lftree;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double gauss(RngHandle& rng) {
  const double u = 1.0 - rng.uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::acos(-1.0) * rng.uniform());
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

RunConfig levy_config(std::uint64_t seed, Policy policy) {
  RunConfig cfg;
  cfg.pool.levy.dim = 1;
  cfg.pool.levy.samples = 1000;
  cfg.n_init = 10;
  cfg.budget = 30;
  cfg.seed = seed;
  cfg.policy = policy;
  return cfg;
}

Outcome criterion1() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::future<std::array<double, 3>>> jobs;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    jobs.push_back(std::async(std::launch::async, [seed] {
      auto tree = levy_config(seed, Policy::llmat);
      tree.clustering.kind = ClusteringKind::kmeans;
      tree.clustering.clusters = 5;
      tree.p_threshold = 0.05;
      return std::array<double, 3>{run(tree).metrics.gap.back(),
                                   run(levy_config(seed, Policy::lfbo_root)).metrics.gap.back(),
                                   run(levy_config(seed, Policy::random)).metrics.gap.back()};
    }));
  }
  std::vector<double> tree, root, rnd;
  for (auto& j : jobs) {
    const auto g = j.get();
    tree.push_back(g[0]);
    root.push_back(g[1]);
    rnd.push_back(g[2]);
  }
  const double mt = median(tree), mr = median(root), mx = median(rnd);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Outcome o;
  o.pass = mt >= mr - 0.02 && mt >= mx + 0.05 && mr >= mx + 0.05;
  o.detail = "median final GAP llmat " + fmt("%.4f", mt) + ", lfbo_root " + fmt("%.4f", mr) + ", random " +
             fmt("%.4f", mx) + " over 15 seeds in " + fmt("%.1f", secs) + " s";
  return o;
}

Outcome criterion2() {
  std::size_t equal = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto tree = levy_config(seed, Policy::llmat);
    tree.tree.max_depth = 0;
    tree.clustering.kind = ClusteringKind::none;
    if (run(tree).selections == run(levy_config(seed, Policy::lfbo_root)).selections) ++equal;
  }
  return {equal == 5, std::to_string(equal) + "/5 seeds with identical selection sequences"};
}

Outcome criterion3() {
  const auto start = std::chrono::steady_clock::now();
  RngHandle rng(3, "acceptance.stats");
  std::size_t bad = 0, checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.below(5);
    std::vector<std::vector<double>> groups(k);
    for (auto& g : groups) {
      const std::size_t n = 3 + rng.below(28);
      const double loc = rng.uniform(-5.0, 5.0);
      const double scale = std::exp(rng.uniform(-2.0, 2.0));
      for (std::size_t i = 0; i < n; ++i) g.push_back(loc + scale * gauss(rng));
    }
    std::vector<GroupSummary> summaries;
    for (std::size_t i = 0; i < k; ++i) summaries.push_back(GroupSummary::from_values(static_cast<int>(i), groups[i]));
    const auto w = welch_anova(summaries);
    const auto ow = oracle::welch(groups);
    auto close = [](double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b)); };
    ++checked;
    if (!w || !close(w->f, ow.F, 1e-8) || !close(w->df_den, ow.nu, 1e-8) || std::fabs(w->p_value - ow.p) > 1e-6) ++bad;
    const auto pairs = games_howell(summaries, Correction::none);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j, ++idx) {
        const auto og = oracle::games_howell(groups[i], groups[j]);
        ++checked;
        if (!close(pairs[idx].t, og.t, 1e-8) || !close(pairs[idx].df, og.nu, 1e-8) ||
            std::fabs(pairs[idx].p_value - og.p) > 1e-6) {
          ++bad;
        }
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {bad == 0 && secs < 10.0, std::to_string(bad) + " mismatches over " + std::to_string(checked) +
                                       " Welch and Games-Howell results, " + fmt("%.2f", secs) + " s"};
}

struct RandomProblem {
  CandidatePool pool;
  ObservationSet obs;
  ClassifierParams meta;
};

RandomProblem random_problem(RngHandle& rng, std::size_t n_obs, std::size_t dim) {
  LevySpec spec;
  spec.dim = dim;
  spec.samples = 300;
  spec.seed = rng.next_u64();
  RandomProblem p{make_levy_pool(spec), {}, {}};
  for (auto id : rng.sample_without_replacement(p.pool.size(), n_obs)) p.obs.add(id, oracle_query(p.pool, id));
  p.meta = ClassifierParams::random(dim, rng);
  return p;
}

Outcome criterion4() {
  RngHandle rng(4, "acceptance.tree");
  std::size_t violations = 0, fitted_parents = 0;
  for (int call = 0; call < 200; ++call) {
    const std::size_t depth = rng.below(4);
    const std::size_t m = rng.below(2) == 0 ? 2 : 5;
    const std::size_t n = 10 + rng.below(191);
    auto p = random_problem(rng, n, 1 + rng.below(3));
    TreeConfig cfg;
    cfg.max_depth = depth;
    cfg.min_leaf = m;
    cfg.train.epochs = 3;
    cfg.utility = rng.below(2) == 0 ? UtilityKind::EI : UtilityKind::PI;
    RngHandle round(rng.next_u64(), "round");
    const auto tree = build_tree(p.pool, p.obs, p.meta, cfg, round);
    if (tree.node(0).visits() != n) ++violations;
    for (const auto k : tree.fitted_nodes()) {
      if (!tree.has_children(k)) continue;
      ++fitted_parents;
      const auto& node = tree.node(k);
      const auto& left = tree.node(2 * k + 1).observed_ids;
      const auto& right = tree.node(2 * k + 2).observed_ids;
      std::multiset<CandidateId> parent(node.observed_ids.begin(), node.observed_ids.end());
      std::multiset<CandidateId> kids(left.begin(), left.end());
      kids.insert(right.begin(), right.end());
      if (parent != kids) ++violations;
      const std::set<CandidateId> left_set(left.begin(), left.end());
      for (CandidateId id = 0; id < p.pool.size(); ++id) {
        const auto child = route(tree, k, p.pool.features(id));
        if (child != 2 * k + 1 && child != 2 * k + 2) ++violations;
        if (parent.contains(id) && (child == 2 * k + 1) != left_set.contains(id)) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations over 200 builds (" +
                               std::to_string(fitted_parents) + " fitted inner nodes checked)"};
}

Outcome criterion5() {
  std::size_t ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngHandle rng(seed, "acceptance.reptile");
    auto p = random_problem(rng, 40, 2);
    TreeConfig cfg;
    cfg.train.epochs = 5;
    cfg.meta_rate = 0.0;
    RngHandle r0(seed, "round");
    const auto frozen = build_tree(p.pool, p.obs, p.meta, cfg, r0);
    cfg.meta_rate = 1.0;
    RngHandle r1(seed, "round");
    const auto copied = build_tree(p.pool, p.obs, p.meta, cfg, r1);
    const auto fitted = copied.fitted_nodes();
    if (!frozen.fitted_nodes().empty() && frozen.meta().bitwise_equal(p.meta) && !fitted.empty() &&
        copied.meta().bitwise_equal(copied.node(fitted.back()).params)) {
      ++ok;
    }
  }
  return {ok == 20, std::to_string(ok) + "/20 seeds satisfy both identities bitwise"};
}

Outcome criterion6() {
  RngHandle rng(6, "acceptance.loss");
  std::size_t bad_loss = 0;
  for (int b = 0; b < 50; ++b) {
    const std::size_t d = 1 + rng.below(4);
    const std::size_t n = 1 + rng.below(64);
    const auto params = ClassifierParams::random(d, rng);
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    std::vector<LabeledPoint> batch;
    for (auto& r : rows) {
      for (auto& v : r) v = rng.uniform(-3.0, 3.0);
    }
    for (auto& r : rows) batch.push_back({r, rng.uniform(-1.0, 1.0)});
    const double tau = rng.uniform(-0.5, 0.5);
    // Binary cross-entropy over the weighted dataset in which every sample
    // carries label 0 and every sample above tau also carries label 1.
    double expected = 0.0;
    for (const auto& pt : batch) {
      const double pi = oracle::clamped_probability(oracle::mlp_logit(params.values(), d, pt.features));
      expected += oracle::bce(pi, 0.0);
      if (pt.y > tau) expected += oracle::bce(pi, 1.0);
    }
    expected /= static_cast<double>(n);
    if (std::fabs(lfbo_loss(params, batch, UtilitySpec{UtilityKind::PI, tau}) - expected) > 1e-10) ++bad_loss;
  }
  std::size_t bad_grad = 0;
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t d = 1 + rng.below(3);
    auto params = ClassifierParams::random(d, rng);
    std::vector<std::vector<double>> rows(5, std::vector<double>(d));
    std::vector<LabeledPoint> batch;
    for (auto& r : rows) {
      for (auto& v : r) v = rng.uniform(-2.0, 2.0);
    }
    for (auto& r : rows) batch.push_back({r, rng.uniform(-1.0, 1.0)});
    const UtilitySpec u{trial % 2 == 0 ? UtilityKind::PI : UtilityKind::EI, 0.0};
    std::vector<double> grad;
    lfbo_loss_and_gradient(params, batch, u, grad);
    double diff2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double keep = params.values()[i];
      params.values()[i] = keep + 1e-5;
      const double up = lfbo_loss(params, batch, u);
      params.values()[i] = keep - 1e-5;
      const double down = lfbo_loss(params, batch, u);
      params.values()[i] = keep;
      const double numeric = (up - down) / 2e-5;
      diff2 += (numeric - grad[i]) * (numeric - grad[i]);
      norm2 += std::max(numeric * numeric, grad[i] * grad[i]);
    }
    if (!(std::sqrt(diff2 / norm2) <= 1e-4)) ++bad_grad;
  }
  return {bad_loss == 0 && bad_grad == 0,
          std::to_string(bad_loss) + "/50 PI batches differ from the weighted cross-entropy oracle (every sample "
                                     "as label 0, samples above tau also as label 1); " +
              std::to_string(bad_grad) + "/6 gradient checks above relative error 1e-4"};
}

Outcome criterion7() {
  RngHandle rng(7, "acceptance.liveness");
  std::size_t failures = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 5 + rng.below(60);
    std::vector<Candidate> cs(n);
    for (std::size_t i = 0; i < n; ++i) {
      cs[i].id = i;
      cs[i].features = {rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
      cs[i].oracle_value = gauss(rng);
    }
    const CandidatePool pool(cs, ObjectiveSense::maximize);
    const std::size_t depth = rng.below(4);
    std::vector<TreeNode> nodes(AcquisitionTree::capacity(depth));
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      auto& node = nodes[k];
      node.index = k;
      const bool parent_fitted = k == 0 || nodes[AcquisitionTree::parent_of(k)].fitted;
      node.fitted = k == 0 || (parent_fitted && rng.below(3) != 0);
      if (node.fitted || rng.below(2) == 0) {
        const std::size_t visits = rng.below(6);
        for (std::size_t v = 0; v < visits; ++v) node.observed_ids.push_back(rng.below(n));
      }
      node.mean = gauss(rng);
      node.variance = rng.uniform(0.0, 2.0);
      if (node.fitted) node.params = ClassifierParams::random(2, rng);
    }
    if (nodes[0].observed_ids.empty()) nodes[0].observed_ids.push_back(0);
    const AcquisitionTree tree(depth, 2, nodes, ClassifierParams(2));

    ObservationSet obs;
    const std::size_t n_obs = rng.below(n);  // at least one candidate stays unobserved
    for (auto id : rng.sample_without_replacement(n, n_obs)) obs.add(id, pool.internal_value(id));
    CandidateMask retained(n, false);
    const int mode = static_cast<int>(rng.below(3));
    for (std::size_t i = 0; i < n; ++i) retained[i] = mode == 0 ? false : mode == 1 ? true : rng.below(2) == 0;

    const ScoreSpec score{rng.below(2) == 0 ? ScoreKind::UCT : ScoreKind::VAR, rng.uniform(0.0, 2.0)};
    try {
      const auto path = select_path(tree, score);
      const auto res = select_candidate(tree, path, pool, obs, retained);
      if (res.candidate_id >= n || obs.contains(res.candidate_id)) ++failures;
    } catch (const std::exception&) {
      ++failures;
    }
  }
  return {failures == 0, std::to_string(failures) + " failures over 500 fuzzed configurations"};
}

Outcome criterion8() {
  std::size_t bad = 0;
  bad += gap(10.0, 2.0, 10.0) != 1.0;
  bad += gap(2.0, 2.0, 10.0) != 0.0;
  bad += gap(6.0, 2.0, 10.0) != 0.5;
  bad += avg_regret(std::vector<double>{5.0, 5.0}, 5.0) != 0.0;
  bad += avg_regret(std::vector<double>{5.0, 3.0}, 5.0) != 1.0;
  bad += avg_regret(std::vector<double>{5.0, 3.0, 4.0}, 5.0) != 1.0;
  RngHandle rng(8, "acceptance.metrics");
  double worst = 0.0;
  // Wide maps on a dyadic grid, where a * y + b is exact in double precision.
  for (int i = 0; i < 1000; ++i) {
    auto grid = [&rng](double lo, double hi) { return std::ldexp(std::floor(std::ldexp(rng.uniform(lo, hi), 20)), -20); };
    const double y0 = grid(-5.0, 5.0);
    const double ys = y0 + grid(0.001, 5.0) + std::ldexp(1.0, -20);
    const double yt = std::min(ys, y0 + grid(0.0, 5.0));
    const double a = std::ldexp(1.0, static_cast<int>(rng.below(17)) - 8);
    const double b = std::floor(rng.uniform(-1000.0, 1000.0));
    worst = std::max(worst, std::fabs(gap(a * yt + b, a * y0 + b, a * ys + b) - gap(yt, y0, ys)));
  }
  // General maps with spans of order one.
  for (int i = 0; i < 1000; ++i) {
    const double y0 = rng.uniform(-5.0, 5.0);
    const double ys = y0 + rng.uniform(1.0, 5.0);
    const double yt = rng.uniform(y0, ys);
    const double a = std::exp(rng.uniform(-2.0, 2.0));
    const double b = rng.uniform(-10.0, 10.0);
    worst = std::max(worst, std::fabs(gap(a * yt + b, a * y0 + b, a * ys + b) - gap(yt, y0, ys)));
  }
  std::size_t filtered = 0;
  for (int f = 0; f < 50; ++f) {
    std::vector<std::vector<double>> groups(2 + rng.below(5));
    for (std::size_t c = 0; c < groups.size(); ++c) {
      const std::size_t n = rng.below(12);
      for (std::size_t i = 0; i < n; ++i) groups[c].push_back(10.0 * static_cast<double>(c) + gauss(rng));
    }
    for (auto corr : {Correction::none, Correction::bonferroni}) {
      const auto sel = select_groups(groups, 0.0, corr);
      if (sel.retained.size() != groups.size() || !sel.excluded.empty()) ++filtered;
    }
  }
  return {bad == 0 && worst <= 1e-12 && filtered == 0,
          std::to_string(bad) + " fixture mismatches, worst affine GAP deviation over 2000 maps " + fmt("%.2e", worst) + ", " +
              std::to_string(filtered) + "/100 p=0 fixtures dropped a cluster"};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion9(const std::string& cli, const fs::path& work) {
  if (cli.empty()) return {false, "no CLI path given (--cli)"};
  const fs::path cfg = work / "determinism.toml";
  std::ofstream(cfg) << "[pool]\nsource = levy\nlevy_samples = 1000\n\n[clustering]\nsource = kmeans\n\n"
                        "[optimizer]\np_threshold = 0.05\n\n[run]\nseed = 3\n";
  int status = 0;
  for (const char* name : {"first.jsonl", "second.jsonl"}) {
    const std::string cmd = "\"" + cli + "\" run --config \"" + cfg.string() + "\" -o \"" + (work / name).string() +
                            "\" --timing \"" + (work / (std::string(name) + ".timing.json")).string() + "\" > /dev/null";
    status |= std::system(cmd.c_str());
  }
  const auto a = slurp(work / "first.jsonl");
  const auto b = slurp(work / "second.jsonl");
  return {status == 0 && !a.empty() && a == b,
          "two CLI runs " + std::string(a == b ? "byte-identical" : "differ") + " (" + std::to_string(a.size()) +
              " bytes)"};
}

Outcome criterion10(const fs::path& work) {
  std::vector<Candidate> cs;
  for (std::size_t i = 0; i < 130; ++i) {
    Candidate c;
    c.id = i;
    c.text = "mol_" + std::to_string(i);
    c.features = {static_cast<double>(i)};
    cs.push_back(c);
  }
  const CandidatePool pool(cs, ObjectiveSense::maximize);
  const auto tmpl = PromptTemplate::builtin("redoxmer");
  mock::ChatServer server;
  server.label = [](int k) { return (k * 7) % 5; };
  LlmEndpointConfig endpoint;
  endpoint.base_url = server.base_url();
  endpoint.model = "mock";
  endpoint.initial_backoff_seconds = 0.001;

  const auto clean = llm_cluster(pool, tmpl, endpoint, work / "clean.csv");
  bool mapping = clean.fallback_ids.empty();
  for (std::size_t i = 0; i < pool.size(); ++i) mapping = mapping && clean.assignment.labels[i] == static_cast<int>((i * 7) % 5);

  server.garbage_batch = 100;
  bool fallback = false;
  try {
    const auto dirty = llm_cluster(pool, tmpl, endpoint, work / "dirty.csv");
    fallback = dirty.fallback_ids.size() == 30;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const int want = i >= 100 ? 2 : static_cast<int>((i * 7) % 5);
      fallback = fallback && dirty.assignment.labels[i] == want;
    }
  } catch (const std::exception&) {
    fallback = false;
  }

  const int hits_before = server.hits.load();
  const auto cached = llm_cluster(pool, tmpl, endpoint, work / "clean.csv");
  const bool offline = cached.requests == 0 && server.hits.load() == hits_before &&
                       cached.assignment.labels == clean.assignment.labels;
  return {mapping && fallback && offline,
          std::string("clean mapping ") + (mapping ? "exact" : "wrong") + ", corrupted batch " +
              (fallback ? "fell back" : "mishandled") + ", cached replay " + std::to_string(cached.requests) +
              " requests"};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
  }
  const fs::path work = fs::temp_directory_path() / "lftree_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Levy-1D method ordering", criterion1},
      {"reduction identity", criterion2},
      {"statistical-test oracle equivalence", criterion3},
      {"tree partition invariants", criterion4},
      {"Reptile identities", criterion5},
      {"LFBO loss correctness", criterion6},
      {"selection liveness", criterion7},
      {"metric formulas", criterion8},
      {"determinism", [&] { return criterion9(cli, work); }},
      {"LLM-clusterer robustness", [&] { return criterion10(work); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " (" << criteria[i].first
              << "): " << o.detail << std::endl;
  }
  fs::remove_all(work);
  return failed == 0 ? 0 : 1;
}
