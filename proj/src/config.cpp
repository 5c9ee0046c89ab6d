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

#include <charconv>
#include <cmath>
#include <functional>
#include <map>

#include <json.hpp>

#include "lftree/config.hpp"
#include "lftree/error.hpp"
#include "lftree/io.hpp"

namespace lftree {

namespace {

using Setter = std::function<void(RunConfig&, const std::string&, const std::filesystem::path&)>;

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
  return out;
}

std::size_t to_size(const std::string& key, const std::string& value) {
  return static_cast<std::size_t>(to_u64(key, value));
}

double to_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a finite number, got '" + value + "'");
  }
  return out;
}

std::filesystem::path to_path(const std::string& value, const std::filesystem::path& base) {
  std::filesystem::path p(value);
  if (value.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

template <class F>
auto parsed(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"pool.source",
       [](RunConfig& c, const std::string& v, const auto&) {
         if (v == "levy") {
           c.pool.kind = PoolKind::levy;
         } else if (v == "csv" || v == "file") {
           c.pool.kind = PoolKind::csv;
         } else {
           throw ConfigError("pool.source: expected levy or csv, got '" + v + "'");
         }
       }},
      {"pool.path", [](RunConfig& c, const std::string& v, const auto& b) { c.pool.path = to_path(v, b); }},
      {"pool.sense",
       [](RunConfig& c, const std::string& v, const auto&) {
         c.pool.sense = parsed("pool.sense", [&] { return parse_objective_sense(v); });
       }},
      {"pool.levy_dim", [](RunConfig& c, const std::string& v, const auto&) { c.pool.levy.dim = to_size("pool.levy_dim", v); }},
      {"pool.levy_samples",
       [](RunConfig& c, const std::string& v, const auto&) { c.pool.levy.samples = to_size("pool.levy_samples", v); }},
      {"pool.levy_seed", [](RunConfig& c, const std::string& v, const auto&) { c.pool.levy.seed = to_u64("pool.levy_seed", v); }},
      {"pool.levy_lo",
       [](RunConfig& c, const std::string& v, const auto&) { c.pool.levy_lo = to_real("pool.levy_lo", v); }},
      {"pool.levy_hi",
       [](RunConfig& c, const std::string& v, const auto&) { c.pool.levy_hi = to_real("pool.levy_hi", v); }},
      {"clustering.source",
       [](RunConfig& c, const std::string& v, const auto&) {
         if (v == "none") {
           c.clustering.kind = ClusteringKind::none;
         } else if (v == "kmeans") {
           c.clustering.kind = ClusteringKind::kmeans;
         } else if (v == "llm") {
           c.clustering.kind = ClusteringKind::llm;
         } else if (v == "file") {
           c.clustering.kind = ClusteringKind::file;
         } else {
           throw ConfigError("clustering.source: expected none, kmeans, llm or file, got '" + v + "'");
         }
       }},
      {"clustering.clusters",
       [](RunConfig& c, const std::string& v, const auto&) { c.clustering.clusters = to_size("clustering.clusters", v); }},
      {"clustering.max_iters",
       [](RunConfig& c, const std::string& v, const auto&) { c.clustering.max_iters = to_size("clustering.max_iters", v); }},
      {"clustering.labels",
       [](RunConfig& c, const std::string& v, const auto& b) { c.clustering.labels = to_path(v, b); }},
      {"clustering.task", [](RunConfig& c, const std::string& v, const auto&) { c.clustering.task = v; }},
      {"clustering.template",
       [](RunConfig& c, const std::string& v, const auto& b) { c.clustering.template_path = to_path(v, b); }},
      {"clustering.batch_size",
       [](RunConfig& c, const std::string& v, const auto&) { c.clustering.batch_size = to_size("clustering.batch_size", v); }},
      {"clustering.base_url", [](RunConfig& c, const std::string& v, const auto&) { c.clustering.endpoint.base_url = v; }},
      {"clustering.model", [](RunConfig& c, const std::string& v, const auto&) { c.clustering.endpoint.model = v; }},
      {"clustering.api_key_env",
       [](RunConfig& c, const std::string& v, const auto&) { c.clustering.endpoint.api_key_env = v; }},
      {"clustering.timeout",
       [](RunConfig& c, const std::string& v, const auto&) {
         c.clustering.endpoint.timeout_seconds = to_real("clustering.timeout", v);
       }},
      {"clustering.max_retries",
       [](RunConfig& c, const std::string& v, const auto&) {
         c.clustering.endpoint.max_retries = to_size("clustering.max_retries", v);
       }},
      {"clustering.temperature",
       [](RunConfig& c, const std::string& v, const auto&) {
         c.clustering.endpoint.temperature = to_real("clustering.temperature", v);
       }},
      {"clustering.parallelism",
       [](RunConfig& c, const std::string& v, const auto&) {
         c.clustering.endpoint.parallelism = to_size("clustering.parallelism", v);
       }},
      {"optimizer.policy",
       [](RunConfig& c, const std::string& v, const auto&) {
         c.policy = parsed("optimizer.policy", [&] { return parse_policy(v); });
       }},
      {"optimizer.utility",
       [](RunConfig& c, const std::string& v, const auto&) {
         c.tree.utility = parsed("optimizer.utility", [&] { return parse_utility_kind(v); });
       }},
      {"optimizer.gamma", [](RunConfig& c, const std::string& v, const auto&) { c.tree.train.gamma = to_real("optimizer.gamma", v); }},
      {"optimizer.lambda", [](RunConfig& c, const std::string& v, const auto&) { c.score.lambda = to_real("optimizer.lambda", v); }},
      {"optimizer.eta", [](RunConfig& c, const std::string& v, const auto&) { c.tree.meta_rate = to_real("optimizer.eta", v); }},
      {"optimizer.max_depth",
       [](RunConfig& c, const std::string& v, const auto&) { c.tree.max_depth = to_size("optimizer.max_depth", v); }},
      {"optimizer.min_leaf",
       [](RunConfig& c, const std::string& v, const auto&) { c.tree.min_leaf = to_size("optimizer.min_leaf", v); }},
      {"optimizer.score",
       [](RunConfig& c, const std::string& v, const auto&) {
         c.score.kind = parsed("optimizer.score", [&] { return parse_score_kind(v); });
       }},
      {"optimizer.p_threshold",
       [](RunConfig& c, const std::string& v, const auto&) { c.p_threshold = to_real("optimizer.p_threshold", v); }},
      {"optimizer.correction",
       [](RunConfig& c, const std::string& v, const auto&) {
         c.correction = parsed("optimizer.correction", [&] { return parse_correction(v); });
       }},
      {"optimizer.epochs", [](RunConfig& c, const std::string& v, const auto&) { c.tree.train.epochs = to_size("optimizer.epochs", v); }},
      {"optimizer.batch_size",
       [](RunConfig& c, const std::string& v, const auto&) { c.tree.train.batch_size = to_size("optimizer.batch_size", v); }},
      {"optimizer.learning_rate",
       [](RunConfig& c, const std::string& v, const auto&) {
         c.tree.train.learning_rate = to_real("optimizer.learning_rate", v);
       }},
      {"optimizer.weight_decay",
       [](RunConfig& c, const std::string& v, const auto&) {
         c.tree.train.weight_decay = to_real("optimizer.weight_decay", v);
       }},
      {"run.seed", [](RunConfig& c, const std::string& v, const auto&) { c.seed = to_u64("run.seed", v); }},
      {"run.n_init", [](RunConfig& c, const std::string& v, const auto&) { c.n_init = to_size("run.n_init", v); }},
      {"run.budget", [](RunConfig& c, const std::string& v, const auto&) { c.budget = to_size("run.budget", v); }},
  };
  return table;
}

std::string unquote(const std::string& value, const std::string& where) {
  if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'')) {
    if (value.back() != value.front()) throw ConfigError(where + ": unterminated string");
    return value.substr(1, value.size() - 2);
  }
  return value;
}

// Drops a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quote != 0) {
      if (ch == quote) quote = 0;
    } else if (ch == '"' || ch == '\'') {
      quote = ch;
    } else if (ch == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

LevySpec PoolConfig::levy_spec() const {
  LevySpec spec = levy;
  spec.box.assign(spec.dim, Interval{levy_lo, levy_hi});
  return spec;
}

std::string to_string(PoolKind kind) { return kind == PoolKind::levy ? "levy" : "csv"; }

std::string to_string(ClusteringKind kind) {
  switch (kind) {
    case ClusteringKind::none:
      return "none";
    case ClusteringKind::kmeans:
      return "kmeans";
    case ClusteringKind::llm:
      return "llm";
    case ClusteringKind::file:
      return "file";
  }
  return "none";
}

std::string to_string(Policy policy) {
  switch (policy) {
    case Policy::llmat:
      return "llmat";
    case Policy::lfbo_root:
      return "lfbo_root";
    case Policy::random:
      return "random";
  }
  return "llmat";
}

Policy parse_policy(const std::string& text) {
  if (text == "llmat") return Policy::llmat;
  if (text == "lfbo_root" || text == "lfbo") return Policy::lfbo_root;
  if (text == "random") return Policy::random;
  throw InvalidArgument("unknown policy '" + text + "' (expected llmat, lfbo_root or random)");
}

void RunConfig::set(const std::string& key, const std::string& value, const std::filesystem::path& base_dir) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second(*this, value, base_dir);
}

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> out;
  for (const auto& entry : setters()) out.push_back(entry.first);
  return out;
}

RunConfig RunConfig::parse(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  std::string section;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = trim(strip_comment(text.substr(start, end - start)));
    start = end + 1;
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside any section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    try {
      cfg.set(key, unquote(trim(line.substr(eq + 1)), where), base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  try {
    return parse(text, path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void RunConfig::validate() const {
  auto check = [](const char* field, auto&& f) {
    try {
      f();
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string(field) + ": " + e.what());
    }
  };
  if (pool.kind == PoolKind::levy) {
    check("pool", [&] { pool.levy_spec().validate(); });
  } else if (pool.path.empty()) {
    throw ConfigError("pool.path: required for a csv pool");
  }
  check("optimizer", [&] { tree.validate(); });
  check("optimizer", [&] { score.validate(); });
  if (!(p_threshold >= 0.0 && p_threshold <= 1.0)) throw ConfigError("optimizer.p_threshold: must lie in [0, 1]");
  if (n_init == 0) throw ConfigError("run.n_init: must be positive");
  switch (clustering.kind) {
    case ClusteringKind::none:
      break;
    case ClusteringKind::kmeans:
      if (clustering.clusters < 2) throw ConfigError("clustering.clusters: must be at least 2");
      if (clustering.max_iters == 0) throw ConfigError("clustering.max_iters: must be positive");
      break;
    case ClusteringKind::llm:
      check("clustering", [&] { clustering.endpoint.validate(); });
      if (clustering.batch_size == 0) throw ConfigError("clustering.batch_size: must be positive");
      [[fallthrough]];
    case ClusteringKind::file:
      if (clustering.labels.empty()) throw ConfigError("clustering.labels: required for " + to_string(clustering.kind));
      break;
  }
}

std::string RunConfig::to_json() const {
  using nlohmann::ordered_json;
  ordered_json j;
  j["pool"] = {{"source", to_string(pool.kind)},
               {"path", pool.path.string()},
               {"sense", to_string(pool.sense)},
               {"levy_dim", pool.levy.dim},
               {"levy_samples", pool.levy.samples},
               {"levy_seed", pool.levy.seed},
               {"levy_lo", pool.levy_lo},
               {"levy_hi", pool.levy_hi}};
  j["clustering"] = {{"source", to_string(clustering.kind)},
                     {"clusters", clustering.clusters},
                     {"max_iters", clustering.max_iters},
                     {"labels", clustering.labels.string()},
                     {"task", clustering.task},
                     {"template", clustering.template_path.string()},
                     {"batch_size", clustering.batch_size},
                     {"base_url", clustering.endpoint.base_url},
                     {"model", clustering.endpoint.model},
                     {"api_key_env", clustering.endpoint.api_key_env},
                     {"timeout", clustering.endpoint.timeout_seconds},
                     {"max_retries", clustering.endpoint.max_retries},
                     {"temperature", clustering.endpoint.temperature},
                     {"parallelism", clustering.endpoint.parallelism}};
  j["optimizer"] = {{"policy", to_string(policy)},
                    {"utility", to_string(tree.utility)},
                    {"gamma", tree.train.gamma},
                    {"lambda", score.lambda},
                    {"eta", tree.meta_rate},
                    {"max_depth", tree.max_depth},
                    {"min_leaf", tree.min_leaf},
                    {"score", to_string(score.kind)},
                    {"p_threshold", p_threshold},
                    {"correction", to_string(correction)},
                    {"epochs", tree.train.epochs},
                    {"batch_size", tree.train.batch_size},
                    {"learning_rate", tree.train.learning_rate},
                    {"weight_decay", tree.train.weight_decay}};
  j["run"] = {{"seed", seed}, {"n_init", n_init}, {"budget", budget}};
  return j.dump();
}

}  // namespace lftree
