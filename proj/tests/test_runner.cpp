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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lftree/error.hpp"
#include "lftree/runner.hpp"

using namespace lftree;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(std::uint64_t seed, Policy policy) {
  RunConfig cfg;
  cfg.pool.levy.samples = 80;
  cfg.pool.levy.seed = 3;
  cfg.tree.train.epochs = 10;
  cfg.n_init = 6;
  cfg.budget = 10;
  cfg.seed = seed;
  cfg.policy = policy;
  return cfg;
}

std::vector<nlohmann::json> records(const std::string& trace) {
  std::vector<nlohmann::json> out;
  std::istringstream in(trace);
  for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
  return out;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("configs parse with sections, comments and quotes") {
  const auto cfg = RunConfig::parse(R"(
# a comment
[pool]
source = "levy"
levy_dim = 1
levy_samples = 200   # trailing comment

[clustering]
source = kmeans
clusters = 4

[optimizer]
policy = llmat
utility = PI
gamma = 0.25
lambda = 1.5
eta = 0.1
max_depth = 3
min_leaf = 3
score = VAR
p_threshold = 0.05
correction = bonferroni
epochs = 20

[run]
seed = 9
n_init = 12
budget = 40
)");
  CHECK(cfg.pool.kind == PoolKind::levy);
  CHECK(cfg.pool.levy.samples == 200);
  CHECK(cfg.clustering.kind == ClusteringKind::kmeans);
  CHECK(cfg.clustering.clusters == 4);
  CHECK(cfg.tree.utility == UtilityKind::PI);
  CHECK(cfg.tree.train.gamma == 0.25);
  CHECK(cfg.score.lambda == 1.5);
  CHECK(cfg.score.kind == ScoreKind::VAR);
  CHECK(cfg.tree.meta_rate == 0.1);
  CHECK(cfg.tree.max_depth == 3);
  CHECK(cfg.tree.min_leaf == 3);
  CHECK(cfg.p_threshold == 0.05);
  CHECK(cfg.correction == Correction::bonferroni);
  CHECK(cfg.tree.train.epochs == 20);
  CHECK(cfg.seed == 9);
  CHECK(cfg.n_init == 12);
  CHECK(cfg.budget == 40);
}

TEST_CASE("defaults follow the reference hyperparameters") {
  const RunConfig cfg;
  CHECK(cfg.tree.utility == UtilityKind::EI);
  CHECK(cfg.tree.train.gamma == 0.5);
  CHECK(cfg.score.lambda == 0.5);
  CHECK(cfg.tree.meta_rate == 0.01);
  CHECK(cfg.tree.max_depth == 2);
  CHECK(cfg.tree.min_leaf == 2);
  CHECK(cfg.score.kind == ScoreKind::UCT);
  CHECK(cfg.p_threshold == 0.0);
  CHECK(cfg.n_init == 10);
  CHECK(cfg.budget == 30);
  CHECK(cfg.policy == Policy::llmat);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("overrides and relative paths") {
  RunConfig cfg;
  cfg.set("run.seed", "42");
  cfg.set("optimizer.policy", "random");
  cfg.set("pool.source", "csv");
  cfg.set("pool.path", "data/pool.csv", "/work");
  CHECK(cfg.seed == 42);
  CHECK(cfg.policy == Policy::random);
  CHECK(cfg.pool.path == fs::path("/work/data/pool.csv"));
  cfg.set("pool.path", "/abs/pool.csv", "/work");
  CHECK(cfg.pool.path == fs::path("/abs/pool.csv"));
  CHECK_FALSE(RunConfig::keys().empty());
  for (const auto& key : RunConfig::keys()) CHECK(key.find('.') != std::string::npos);
}

TEST_CASE("bad configs name the offending field") {
  auto message = [](auto&& f) -> std::string {
    try {
      f();
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message([] { RunConfig::parse("[run]\nsneed = 1\n"); }).find("run.sneed") != std::string::npos);
  CHECK(message([] { RunConfig::parse("[run]\nseed = minus one\n"); }).find("run.seed") != std::string::npos);
  CHECK(message([] { RunConfig::parse("[optimizer]\npolicy = greedy\n"); }).find("optimizer.policy") != std::string::npos);
  CHECK(message([] { RunConfig::parse("seed = 1\n"); }) != "");
  CHECK(message([] { RunConfig::parse("[run\nseed = 1\n"); }) != "");
  RunConfig cfg;
  cfg.p_threshold = 2.0;
  CHECK(message([&] { cfg.validate(); }).find("p_threshold") != std::string::npos);
  cfg = RunConfig{};
  cfg.clustering.kind = ClusteringKind::file;
  CHECK(message([&] { cfg.validate(); }).find("clustering.labels") != std::string::npos);
  cfg = RunConfig{};
  cfg.pool.kind = PoolKind::csv;
  CHECK(message([&] { cfg.validate(); }).find("pool.path") != std::string::npos);
  cfg = RunConfig{};
  cfg.tree.meta_rate = 1.5;
  CHECK(message([&] { cfg.validate(); }).find("optimizer") != std::string::npos);
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/run.toml"), ConfigError);
}

TEST_CASE("config echo is valid json") {
  const auto j = nlohmann::json::parse(RunConfig{}.to_json());
  CHECK(j["optimizer"]["policy"] == "llmat");
  CHECK(j["run"]["budget"] == 30);
}

TEST_CASE("random search exhausts the pool exactly once") {
  auto cfg = small_config(1, Policy::random);
  cfg.budget = 80 - 6;
  const auto res = run(cfg);
  CHECK(res.iterations() == 74);
  CHECK_FALSE(res.exhausted);
  std::set<CandidateId> seen(res.init_ids.begin(), res.init_ids.end());
  seen.insert(res.selections.begin(), res.selections.end());
  CHECK(seen.size() == 80);
  CHECK(res.metrics.gap.back() == 1.0);

  cfg.budget = 100;
  const auto over = run(cfg);
  CHECK(over.exhausted);
  CHECK(over.iterations() == 74);
  const auto recs = records(over.trace);
  CHECK(recs.back()["type"] == "footer");
  CHECK(recs.back()["exhausted"] == true);
  CHECK(recs.back()["queries"] == 80);
}

TEST_CASE("depth zero without clusters reduces to root-only lfbo") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto tree_cfg = small_config(seed, Policy::llmat);
    tree_cfg.tree.max_depth = 0;
    const auto a = run(tree_cfg);
    const auto b = run(small_config(seed, Policy::lfbo_root));
    CHECK(a.selections == b.selections);
    const auto ra = records(a.trace);
    const auto rb = records(b.trace);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 1; i < ra.size(); ++i) CHECK(ra[i].dump() == rb[i].dump());
  }
}

TEST_CASE("runs are deterministic per seed") {
  auto cfg = small_config(5, Policy::llmat);
  cfg.clustering.kind = ClusteringKind::kmeans;
  cfg.p_threshold = 0.05;
  const auto a = run(cfg);
  const auto b = run(cfg);
  CHECK(a.trace == b.trace);
  cfg.seed = 6;
  CHECK(run(cfg).trace != a.trace);
}

TEST_CASE("loop invariants hold for every policy") {
  for (Policy policy : {Policy::llmat, Policy::lfbo_root, Policy::random}) {
    for (std::uint64_t seed = 0; seed < 2; ++seed) {
      auto cfg = small_config(seed, policy);
      cfg.clustering.kind = ClusteringKind::kmeans;
      cfg.clustering.clusters = 3;
      cfg.p_threshold = 0.05;
      const auto res = run(cfg);
      std::set<CandidateId> seen(res.init_ids.begin(), res.init_ids.end());
      for (CandidateId id : res.selections) CHECK(seen.insert(id).second);
      CHECK(seen.size() == cfg.n_init + res.iterations());
      for (std::size_t t = 1; t < res.metrics.best.size(); ++t) {
        CHECK(res.metrics.best[t] >= res.metrics.best[t - 1]);
      }
      const auto recs = records(res.trace);
      CHECK(recs.front()["type"] == "header");
      CHECK(recs.front()["init"].size() == cfg.n_init);
      CHECK(recs.back()["queries"] == cfg.n_init + res.iterations());
      CHECK(recs.size() == res.iterations() + 2);
      for (std::size_t t = 1; t + 1 < recs.size(); ++t) {
        CHECK(recs[t]["t"] == t);
        if (policy == Policy::llmat) CHECK_FALSE(recs[t]["retained"].empty());
      }
    }
  }
}

TEST_CASE("trace replay reproduces the stored metrics") {
  TempDir dir("lftree_runner_replay");
  auto cfg = small_config(2, Policy::llmat);
  const auto res = run(cfg);
  write_run_outputs(res, dir.path / "trace.jsonl", dir.path / "timing.json");
  const auto replay = read_trace_metrics(dir.path / "trace.jsonl");
  REQUIRE(replay.horizon() == res.metrics.horizon());
  const auto recs = records(res.trace);
  for (std::size_t t = 0; t < replay.horizon(); ++t) {
    CHECK(std::fabs(replay.gap[t] - recs[t + 1]["gap"].get<double>()) <= 1e-12);
    CHECK(std::fabs(replay.regret[t] - recs[t + 1]["regret"].get<double>()) <= 1e-12);
    CHECK(std::fabs(replay.gap[t] - res.metrics.gap[t]) <= 1e-12);
  }
  const auto timing = nlohmann::json::parse(std::ifstream(dir.path / "timing.json"));
  CHECK(timing["iterations"].size() == res.iterations());
  CHECK(res.trace.find("seconds") == std::string::npos);
}

TEST_CASE("label files drive offline clustering") {
  TempDir dir("lftree_runner_labels");
  auto cfg = small_config(0, Policy::llmat);
  std::vector<int> labels;
  for (int i = 0; i < 80; ++i) labels.push_back(i % 3);
  write_label_file(dir.path / "labels.csv", labels);
  cfg.clustering.kind = ClusteringKind::file;
  cfg.clustering.labels = dir.path / "labels.csv";
  cfg.p_threshold = 0.05;
  const auto res = run(cfg);
  CHECK(records(res.trace).front()["clusters"] == 3);

  cfg.clustering.kind = ClusteringKind::llm;
  cfg.clustering.labels = dir.path / "missing.csv";
  CHECK_THROWS_AS(run(cfg), IoError);
}

TEST_CASE("csv pools run in their native orientation") {
  TempDir dir("lftree_runner_csv");
  {
    std::ofstream out(dir.path / "pool.csv");
    out << "id,y,f0,f1\n";
    for (int i = 0; i < 40; ++i) out << i << "," << (i - 20) * (i - 20) << "," << (i % 7) << "," << (i / 7) << "\n";
  }
  RunConfig cfg = small_config(0, Policy::llmat);
  cfg.pool.kind = PoolKind::csv;
  cfg.pool.path = dir.path / "pool.csv";
  cfg.pool.sense = ObjectiveSense::minimize;
  cfg.budget = 5;
  const auto res = run(cfg);
  const auto recs = records(res.trace);
  CHECK(recs.front()["y_star"] == 0.0);
  CHECK(recs.front()["sense"] == "minimize");
  CHECK(res.best_native >= 0.0);
  for (std::size_t t = 1; t + 1 < recs.size(); ++t) CHECK(recs[t]["y"].get<double>() >= 0.0);
}
