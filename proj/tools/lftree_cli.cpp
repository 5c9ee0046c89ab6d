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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lftree/lftree.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Failure {
  lftree_status status;
  std::string message;
};

void check(lftree_status status) {
  if (status != LFTREE_OK) throw Failure{status, lftree_last_error()};
}

struct ConfigHandle {
  lftree_config* ptr = nullptr;
  ConfigHandle() = default;
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
  ~ConfigHandle() { lftree_config_free(ptr); }
};

struct PoolHandle {
  lftree_pool* ptr = nullptr;
  PoolHandle() = default;
  PoolHandle(const PoolHandle&) = delete;
  PoolHandle& operator=(const PoolHandle&) = delete;
  ~PoolHandle() { lftree_pool_free(ptr); }
};

struct ConfigOptions {
  std::string path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string policy;
};

void add_config_options(CLI::App* cmd, ConfigOptions& opts) {
  cmd->add_option("-c,--config", opts.path, "Configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--set", opts.overrides, "Override a configuration key, e.g. --set optimizer.gamma=0.25");
  cmd->add_option("--policy", opts.policy, "llmat, lfbo_root or random");
}

void apply(lftree_config* cfg, const std::string& key, const std::string& value) {
  check(lftree_config_set(cfg, key.c_str(), value.c_str()));
}

void load_config(ConfigHandle& cfg, const ConfigOptions& opts) {
  if (opts.path.empty()) {
    check(lftree_config_create(&cfg.ptr));
  } else {
    check(lftree_config_load(opts.path.c_str(), &cfg.ptr));
  }
  for (const auto& item : opts.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Failure{LFTREE_CONFIG, "--set expects key=value, got '" + item + "'"};
    apply(cfg.ptr, item.substr(0, eq), item.substr(eq + 1));
  }
  if (opts.seed) apply(cfg.ptr, "run.seed", std::to_string(*opts.seed));
  if (!opts.policy.empty()) apply(cfg.ptr, "optimizer.policy", opts.policy);
  check(lftree_config_validate(cfg.ptr));
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(start, end - start);
    start = end + 1;
    if (item.empty()) continue;
    try {
      const auto dots = item.find("..");
      if (dots == std::string::npos) {
        seeds.push_back(std::stoull(item));
      } else {
        const auto lo = std::stoull(item.substr(0, dots));
        const auto hi = std::stoull(item.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument("range");
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::exception&) {
      throw Failure{LFTREE_CONFIG, "bad seed list item '" + item + "'"};
    }
  }
  if (seeds.empty()) throw Failure{LFTREE_CONFIG, "empty seed list"};
  return seeds;
}

void print_summary(const lftree_run_summary& s) {
  std::printf("iterations=%zu queries=%zu exhausted=%d best=%.17g gap=%.17g regret=%.17g\n", s.iterations, s.queries,
              s.exhausted, s.best, s.final_gap, s.final_regret);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree-structured likelihood-free Bayesian optimization over candidate pools"};
  app.set_version_flag("--version", std::string(lftree_version()));
  app.require_subcommand(1);

  ConfigOptions run_opts;
  std::string run_trace = "trace.jsonl";
  std::string run_timing;
  auto* run_cmd = app.add_subcommand("run", "Single optimization run");
  add_config_options(run_cmd, run_opts);
  run_cmd->add_option("--seed", run_opts.seed, "Run seed");
  run_cmd->add_option("-o,--trace", run_trace, "Trace output (JSON lines)");
  run_cmd->add_option("--timing", run_timing, "Timing sidecar output (JSON)");

  ConfigOptions sweep_opts;
  std::string sweep_seeds = "0..14";
  std::string sweep_dir = "traces";
  std::size_t sweep_jobs = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "One run per seed");
  add_config_options(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--seeds", sweep_seeds, "Seeds, e.g. 0..14 or 1,4,9");
  sweep_cmd->add_option("-o,--out-dir", sweep_dir, "Directory for trace_seed<N>.jsonl files");
  sweep_cmd->add_option("-j,--jobs", sweep_jobs, "Concurrent runs")->check(CLI::PositiveNumber);

  ConfigOptions cluster_opts;
  std::string cluster_method = "kmeans";
  std::string cluster_out = "labels.csv";
  auto* cluster_cmd = app.add_subcommand("cluster", "Write a cluster label file for the configured pool");
  add_config_options(cluster_cmd, cluster_opts);
  cluster_cmd->add_option("--seed", cluster_opts.seed, "k-means seed");
  cluster_cmd->add_option("-m,--method", cluster_method, "kmeans or llm")->check(CLI::IsMember({"kmeans", "llm"}));
  cluster_cmd->add_option("-o,--out", cluster_out, "Label file, also the LLM label cache");

  double stats_p = 0.05;
  bool stats_bonferroni = false;
  std::string stats_input = "-";
  auto* stats_cmd = app.add_subcommand("stats-test", "Welch ANOVA and Games-Howell on label,value CSV");
  stats_cmd->add_option("-p,--p-threshold", stats_p, "Significance threshold")->check(CLI::Range(0.0, 1.0));
  stats_cmd->add_flag("--bonferroni", stats_bonferroni, "Bonferroni-correct pairwise p-values");
  stats_cmd->add_option("-i,--input", stats_input, "Input CSV, - for standard input");

  std::size_t levy_dim = 1;
  std::size_t levy_samples = 1000;
  std::uint64_t levy_seed = 0;
  double levy_lo = -10.0;
  double levy_hi = 10.0;
  std::string levy_out = "levy.csv";
  auto* levy_cmd = app.add_subcommand("bench-levy", "Write a synthetic Levy pool");
  levy_cmd->add_option("-d,--dim", levy_dim, "Dimension");
  levy_cmd->add_option("-n,--samples", levy_samples, "Number of candidates");
  levy_cmd->add_option("--seed", levy_seed, "Sampling seed");
  levy_cmd->add_option("--lo", levy_lo, "Lower bound per dimension");
  levy_cmd->add_option("--hi", levy_hi, "Upper bound per dimension");
  levy_cmd->add_option("-o,--out", levy_out, "Pool CSV output");

  std::vector<std::string> agg_traces;
  std::string agg_center = "median";
  bool agg_normalize = false;
  std::string agg_out = "summary.csv";
  auto* agg_cmd = app.add_subcommand("aggregate", "Summary CSV over trace files");
  agg_cmd->add_option("traces", agg_traces, "Trace files")->required()->check(CLI::ExistingFile);
  agg_cmd->add_option("--center", agg_center, "mean or median")->check(CLI::IsMember({"mean", "median"}));
  agg_cmd->add_flag("--normalize", agg_normalize, "Divide regrets by each run's span");
  agg_cmd->add_option("-o,--out", agg_out, "Summary CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run_cmd) {
      ConfigHandle cfg;
      load_config(cfg, run_opts);
      lftree_run_summary summary{};
      check(lftree_run(cfg.ptr, run_trace.c_str(), run_timing.empty() ? nullptr : run_timing.c_str(), &summary));
      print_summary(summary);
    } else if (*sweep_cmd) {
      const auto seeds = parse_seed_list(sweep_seeds);
      std::vector<std::unique_ptr<ConfigHandle>> configs;
      for (const auto seed : seeds) {
        auto opts = sweep_opts;
        opts.seed = seed;
        configs.push_back(std::make_unique<ConfigHandle>());
        load_config(*configs.back(), opts);
      }
      std::filesystem::create_directories(sweep_dir);
      std::vector<lftree_status> status(seeds.size(), LFTREE_OK);
      std::vector<std::string> errors(seeds.size());
      std::vector<lftree_run_summary> summaries(seeds.size());
      auto work = [&](std::size_t i) {
        const auto stem = (std::filesystem::path(sweep_dir) / ("trace_seed" + std::to_string(seeds[i]))).string();
        const auto trace = stem + ".jsonl";
        const auto timing = stem + ".timing.json";
        status[i] = lftree_run(configs[i]->ptr, trace.c_str(), timing.c_str(), &summaries[i]);
        if (status[i] != LFTREE_OK) errors[i] = lftree_last_error();
      };
      for (std::size_t start = 0; start < seeds.size(); start += sweep_jobs) {
        std::vector<std::thread> threads;
        for (std::size_t i = start; i < std::min(seeds.size(), start + sweep_jobs); ++i) threads.emplace_back(work, i);
        for (auto& t : threads) t.join();
      }
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (status[i] != LFTREE_OK) throw Failure{status[i], "seed " + std::to_string(seeds[i]) + ": " + errors[i]};
        std::printf("seed=%llu ", static_cast<unsigned long long>(seeds[i]));
        print_summary(summaries[i]);
      }
    } else if (*cluster_cmd) {
      ConfigHandle cfg;
      load_config(cfg, cluster_opts);
      PoolHandle pool;
      check(lftree_pool_from_config(cfg.ptr, &pool.ptr));
      if (cluster_method == "kmeans") {
        char* json = nullptr;
        check(lftree_config_to_json(cfg.ptr, &json));
        const auto echo = nlohmann::json::parse(json);
        lftree_string_free(json);
        const auto& clustering = echo.at("clustering");
        check(lftree_cluster_kmeans(pool.ptr, clustering.at("clusters").get<std::size_t>(),
                                    echo.at("run").at("seed").get<std::uint64_t>(),
                                    clustering.at("max_iters").get<std::size_t>(), cluster_out.c_str()));
        std::printf("wrote %s\n", cluster_out.c_str());
      } else {
        std::size_t requests = 0;
        check(lftree_cluster_llm(pool.ptr, cfg.ptr, cluster_out.c_str(), &requests));
        std::printf("wrote %s (%zu requests)\n", cluster_out.c_str(), requests);
      }
    } else if (*stats_cmd) {
      std::string input;
      if (stats_input == "-") {
        input.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
      } else {
        std::ifstream in(stats_input, std::ios::binary);
        if (!in) throw Failure{LFTREE_IO, "cannot read " + stats_input};
        input.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
      }
      char* json = nullptr;
      check(lftree_stats_test(input.c_str(), stats_p, stats_bonferroni ? 1 : 0, &json));
      std::printf("%s\n", json);
      lftree_string_free(json);
    } else if (*levy_cmd) {
      PoolHandle pool;
      check(lftree_pool_make_levy(levy_dim, levy_samples, levy_seed, levy_lo, levy_hi, &pool.ptr));
      check(lftree_pool_write_csv(pool.ptr, levy_out.c_str()));
      std::printf("wrote %s (%zu candidates)\n", levy_out.c_str(), lftree_pool_size(pool.ptr));
    } else if (*agg_cmd) {
      std::vector<const char*> paths;
      for (const auto& p : agg_traces) paths.push_back(p.c_str());
      check(lftree_aggregate(paths.data(), paths.size(), agg_center == "median" ? 1 : 0, agg_normalize ? 1 : 0,
                             agg_out.c_str()));
      std::printf("wrote %s (%zu runs)\n", agg_out.c_str(), paths.size());
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "lftree: %s: %s\n", lftree_status_name(f.status), f.message.c_str());
    return f.status == LFTREE_CONFIG || f.status == LFTREE_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lftree: %s\n", e.what());
    return kExitFailure;
  }
  return 0;
}
