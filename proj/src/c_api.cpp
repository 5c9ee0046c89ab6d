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

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include <json.hpp>

#include "lftree/bench.hpp"
#include "lftree/clustering.hpp"
#include "lftree/config.hpp"
#include "lftree/error.hpp"
#include "lftree/io.hpp"
#include "lftree/lftree.h"
#include "lftree/metrics.hpp"
#include "lftree/runner.hpp"
#include "lftree/stats.hpp"

struct lftree_pool {
  lftree::CandidatePool pool;
};

struct lftree_config {
  lftree::RunConfig config;
};

namespace {

thread_local std::string last_error;

template <class F>
lftree_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return LFTREE_OK;
  } catch (const lftree::ConfigError& e) {
    last_error = e.what();
    return LFTREE_CONFIG;
  } catch (const lftree::IngestionError& e) {
    last_error = e.what();
    return LFTREE_INGESTION;
  } catch (const lftree::InvalidArgument& e) {
    last_error = e.what();
    return LFTREE_INVALID_ARGUMENT;
  } catch (const lftree::NumericError& e) {
    last_error = e.what();
    return LFTREE_NUMERIC;
  } catch (const lftree::NetworkError& e) {
    last_error = e.what();
    return LFTREE_NETWORK;
  } catch (const lftree::ExhaustedError& e) {
    last_error = e.what();
    return LFTREE_EXHAUSTED;
  } catch (const lftree::IoError& e) {
    last_error = e.what();
    return LFTREE_IO;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LFTREE_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return LFTREE_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw lftree::InvalidArgument(std::string(what) + " is null");
}

char* copy_string(const std::string& text) {
  auto* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

lftree::PromptTemplate make_template(const lftree::ClusteringConfig& c) {
  lftree::PromptTemplate tmpl = c.template_path.empty() ? lftree::PromptTemplate::builtin(c.task)
                                                        : lftree::PromptTemplate::load(c.template_path, c.task);
  tmpl.batch_size = c.batch_size;
  tmpl.cluster_count = c.clusters;
  tmpl.validate();
  return tmpl;
}

nlohmann::ordered_json pair_json(const lftree::PairwiseResult& r) {
  return {{"label_i", r.label_i}, {"label_j", r.label_j}, {"t", r.t}, {"df", r.df}, {"p_value", r.p_value}};
}

}  // namespace

extern "C" {

const char* lftree_version(void) { return LFTREE_VERSION_STRING; }

const char* lftree_last_error(void) { return last_error.c_str(); }

const char* lftree_status_name(lftree_status status) {
  switch (status) {
    case LFTREE_OK:
      return "ok";
    case LFTREE_INVALID_ARGUMENT:
      return "invalid argument";
    case LFTREE_IO:
      return "i/o error";
    case LFTREE_INGESTION:
      return "ingestion error";
    case LFTREE_NUMERIC:
      return "numeric error";
    case LFTREE_CONFIG:
      return "configuration error";
    case LFTREE_NETWORK:
      return "network error";
    case LFTREE_EXHAUSTED:
      return "pool exhausted";
    case LFTREE_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void lftree_string_free(char* text) { std::free(text); }

lftree_status lftree_pool_load(const char* path, const char* sense, lftree_pool** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    const auto s = sense == nullptr ? lftree::ObjectiveSense::maximize : lftree::parse_objective_sense(sense);
    *out = new lftree_pool{lftree::load_pool(path, s)};
  });
}

lftree_status lftree_pool_make_levy(size_t dim, size_t samples, uint64_t seed, double lo, double hi,
                                    lftree_pool** out) {
  return guarded([&] {
    require(out, "out");
    lftree::LevySpec spec;
    spec.dim = dim;
    spec.samples = samples;
    spec.seed = seed;
    spec.box.assign(dim, lftree::Interval{lo, hi});
    *out = new lftree_pool{lftree::make_levy_pool(spec)};
  });
}

lftree_status lftree_pool_from_config(const lftree_config* config, lftree_pool** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = new lftree_pool{lftree::build_pool(config->config)};
  });
}

void lftree_pool_free(lftree_pool* pool) { delete pool; }

size_t lftree_pool_size(const lftree_pool* pool) { return pool == nullptr ? 0 : pool->pool.size(); }

size_t lftree_pool_dim(const lftree_pool* pool) { return pool == nullptr ? 0 : pool->pool.dim(); }

lftree_status lftree_pool_oracle(const lftree_pool* pool, size_t id, double* value) {
  return guarded([&] {
    require(pool, "pool");
    require(value, "value");
    *value = pool->pool.to_native(lftree::oracle_query(pool->pool, id));
  });
}

lftree_status lftree_pool_write_csv(const lftree_pool* pool, const char* path) {
  return guarded([&] {
    require(pool, "pool");
    require(path, "path");
    lftree::write_pool_csv(pool->pool, path);
  });
}

lftree_status lftree_config_create(lftree_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new lftree_config{};
  });
}

lftree_status lftree_config_load(const char* path, lftree_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new lftree_config{lftree::RunConfig::load(path)};
  });
}

lftree_status lftree_config_set(lftree_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    config->config.set(key, value);
  });
}

lftree_status lftree_config_validate(const lftree_config* config) {
  return guarded([&] {
    require(config, "config");
    config->config.validate();
  });
}

lftree_status lftree_config_to_json(const lftree_config* config, char** json) {
  return guarded([&] {
    require(config, "config");
    require(json, "json");
    *json = copy_string(config->config.to_json());
  });
}

void lftree_config_free(lftree_config* config) { delete config; }

lftree_status lftree_run(const lftree_config* config, const char* trace_path, const char* timing_path,
                         lftree_run_summary* summary) {
  return guarded([&] {
    require(config, "config");
    require(trace_path, "trace_path");
    const auto result = lftree::run(config->config);
    lftree::write_run_outputs(result, trace_path, timing_path == nullptr ? "" : timing_path);
    if (summary != nullptr) {
      summary->iterations = result.iterations();
      summary->queries = result.init_ids.size() + result.iterations();
      summary->exhausted = result.exhausted ? 1 : 0;
      summary->best = result.best_native;
      summary->final_gap = result.metrics.gap.empty() ? 0.0 : result.metrics.gap.back();
      summary->final_regret = result.metrics.regret.empty() ? 0.0 : result.metrics.regret.back();
    }
  });
}

lftree_status lftree_cluster_kmeans(const lftree_pool* pool, size_t clusters, uint64_t seed, size_t max_iters,
                                    const char* labels_path) {
  return guarded([&] {
    require(pool, "pool");
    require(labels_path, "labels_path");
    lftree::RngHandle rng(seed, "clustering.kmeans");
    const auto result = lftree::kmeans_cluster(pool->pool, clusters, rng, max_iters);
    lftree::write_label_file(labels_path, result.assignment.labels);
  });
}

lftree_status lftree_cluster_llm(const lftree_pool* pool, const lftree_config* config, const char* cache_path,
                                 size_t* requests) {
  return guarded([&] {
    require(pool, "pool");
    require(config, "config");
    require(cache_path, "cache_path");
    const auto& c = config->config.clustering;
    const auto result = lftree::llm_cluster(pool->pool, make_template(c), c.endpoint, cache_path);
    if (requests != nullptr) *requests = result.requests;
  });
}

lftree_status lftree_stats_test(const char* csv_text, double p_threshold, int bonferroni, char** json) {
  return guarded([&] {
    require(csv_text, "csv_text");
    require(json, "json");
    std::vector<std::vector<double>> values;
    const auto records = lftree::parse_csv(csv_text);
    for (std::size_t r = 0; r < records.size(); ++r) {
      const auto& f = records[r].fields;
      const std::string where = "line " + std::to_string(records[r].line);
      if (f.size() != 2) throw lftree::IngestionError(where + ": expected label,value");
      long long label = 0;
      double value = 0.0;
      try {
        std::size_t used = 0;
        const auto lt = lftree::trim(f[0]);
        label = std::stoll(lt, &used);
        if (used != lt.size()) throw std::invalid_argument("label");
        const auto vt = lftree::trim(f[1]);
        value = std::stod(vt, &used);
        if (used != vt.size()) throw std::invalid_argument("value");
      } catch (const std::exception&) {
        if (r == 0) continue;  // header row
        throw lftree::IngestionError(where + ": expected an integer label and a numeric value");
      }
      if (label < 0 || label > 1000000) throw lftree::IngestionError(where + ": label out of range");
      if (!std::isfinite(value)) throw lftree::IngestionError(where + ": non-finite value");
      if (values.size() <= static_cast<std::size_t>(label)) values.resize(static_cast<std::size_t>(label) + 1);
      values[static_cast<std::size_t>(label)].push_back(value);
    }
    if (values.empty()) throw lftree::IngestionError("no data rows");

    const auto correction = bonferroni != 0 ? lftree::Correction::bonferroni : lftree::Correction::none;
    std::vector<lftree::GroupSummary> eligible;
    nlohmann::ordered_json groups = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < values.size(); ++c) {
      if (values[c].empty()) continue;
      const auto g = lftree::GroupSummary::from_values(static_cast<int>(c), values[c]);
      groups.push_back({{"label", g.label}, {"n", g.n}, {"mean", g.mean}, {"variance", g.variance}});
      if (g.n >= 2) eligible.push_back(g);
    }
    nlohmann::ordered_json out;
    out["groups"] = std::move(groups);
    const auto welch = lftree::welch_anova(eligible);
    out["welch"] = welch ? nlohmann::ordered_json{{"f", welch->f},
                                                  {"df_num", welch->df_num},
                                                  {"df_den", welch->df_den},
                                                  {"p_value", welch->p_value}}
                         : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    if (eligible.size() >= 2) {
      for (const auto& r : lftree::games_howell(eligible, correction)) pairs.push_back(pair_json(r));
    }
    out["games_howell"] = std::move(pairs);
    out["correction"] = lftree::to_string(correction);
    out["p_threshold"] = p_threshold;
    const auto sel = lftree::select_groups(values, p_threshold, correction);
    out["retained"] = sel.retained;
    out["excluded"] = sel.excluded;
    out["best_label"] = sel.best_label ? nlohmann::ordered_json(*sel.best_label) : nlohmann::ordered_json(nullptr);
    *json = copy_string(out.dump(2));
  });
}

lftree_status lftree_aggregate(const char* const* trace_paths, size_t count, int median, int normalize,
                               const char* out_csv) {
  return guarded([&] {
    require(trace_paths, "trace_paths");
    require(out_csv, "out_csv");
    std::vector<lftree::MetricSeries> runs;
    for (size_t i = 0; i < count; ++i) {
      require(trace_paths[i], "trace path");
      runs.push_back(lftree::read_trace_metrics(trace_paths[i]));
    }
    const auto summary = lftree::aggregate(runs, median != 0 ? lftree::CenterKind::median : lftree::CenterKind::mean,
                                           normalize != 0);
    lftree::write_file(out_csv, summary.to_csv());
  });
}

}  // extern "C"
