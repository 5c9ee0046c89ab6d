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
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "lftree/clustering.hpp"
#include "lftree/error.hpp"
#include "lftree/io.hpp"

namespace lftree {

using nlohmann::json;

namespace {

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

json cache_key(const CandidatePool& pool, const PromptTemplate& tmpl, const LlmEndpointConfig& endpoint) {
  return json{{"format", "lftree.label_cache"},
              {"version", 1},
              {"task", tmpl.task},
              {"template_hash", hex64(tmpl.hash())},
              {"model", endpoint.model},
              {"cluster_count", tmpl.cluster_count},
              {"pool_size", pool.size()}};
}

std::filesystem::path sidecar_path(const std::filesystem::path& cache_path) {
  auto p = cache_path;
  p += ".meta.json";
  return p;
}

// Reads a possibly partial cache; entries without a label stay -1. A cache
// written under a different key is treated as empty.
std::vector<int> load_cache(const std::filesystem::path& cache_path, const json& key, std::size_t n) {
  std::vector<int> labels(n, -1);
  const auto meta = sidecar_path(cache_path);
  if (!std::filesystem::exists(cache_path) || !std::filesystem::exists(meta)) return labels;
  json stored;
  try {
    stored = json::parse(read_file(meta));
  } catch (const json::exception&) {
    return labels;
  }
  if (stored != key) return labels;

  const auto records = parse_csv(read_file(cache_path));
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    if (f.size() != 2) throw IngestionError(cache_path.string() + " line " + std::to_string(records[r].line) + ": expected 2 fields");
    const auto id = std::stoll(trim(f[0]));
    const auto label = std::stoll(trim(f[1]));
    if (id < 0 || static_cast<std::size_t>(id) >= n || label < 0 ||
        label >= static_cast<long long>(key.at("cluster_count").get<std::size_t>())) {
      throw IngestionError(cache_path.string() + " line " + std::to_string(records[r].line) + ": entry out of range");
    }
    labels[static_cast<std::size_t>(id)] = static_cast<int>(label);
  }
  return labels;
}

void store_cache(const std::filesystem::path& cache_path, const json& key, const std::vector<int>& labels) {
  std::string out = "id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) out += std::to_string(i) + "," + std::to_string(labels[i]) + "\n";
  }
  write_file(cache_path, out);
  write_file(sidecar_path(cache_path), key.dump(2) + "\n");
}

}  // namespace

void LlmEndpointConfig::validate() const {
  if (base_url.find("://") == std::string::npos) throw InvalidArgument("LLM base URL needs a scheme: '" + base_url + "'");
  if (model.empty()) throw InvalidArgument("LLM model identifier is empty");
  if (!(timeout_seconds > 0.0)) throw InvalidArgument("LLM timeout must be positive");
  if (!(initial_backoff_seconds >= 0.0) || !(backoff_factor >= 1.0)) throw InvalidArgument("invalid LLM backoff settings");
  if (!std::isfinite(temperature) || temperature < 0.0) throw InvalidArgument("LLM temperature must be non-negative");
  if (parallelism == 0) throw InvalidArgument("LLM parallelism must be positive");
}

ChatCompletionClient::ChatCompletionClient(LlmEndpointConfig config) : config_(std::move(config)) {
  config_.validate();
  const auto scheme_end = config_.base_url.find("://") + 3;
  const auto slash = config_.base_url.find('/', scheme_end);
  scheme_host_ = config_.base_url.substr(0, slash);
  path_ = slash == std::string::npos ? std::string() : config_.base_url.substr(slash);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
}

std::string ChatCompletionClient::complete(const std::string& prompt) {
  const json body = {{"model", config_.model},
                     {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
                     {"temperature", config_.temperature}};
  const std::string payload = body.dump();
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(config_.timeout_seconds));
  std::string last_error;
  double backoff = config_.initial_backoff_seconds;
  for (std::size_t attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= config_.backoff_factor;
    }
    httplib::Client client(scheme_host_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    ++requests_;
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    try {
      const auto reply = json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      return {};
    }
  }
  throw NetworkError("chat completion at " + scheme_host_ + path_ + " failed after " +
                     std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

LlmClusterResult llm_cluster(const CandidatePool& pool, const PromptTemplate& tmpl,
                             const LlmEndpointConfig& endpoint, const std::filesystem::path& cache_path) {
  endpoint.validate();
  const auto batches = render_prompt_batches(tmpl, pool);
  const json key = cache_key(pool, tmpl, endpoint);
  std::vector<int> labels = load_cache(cache_path, key, pool.size());

  std::vector<std::size_t> pending;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const auto& batch = batches[b];
    for (std::size_t k = 0; k < batch.count; ++k) {
      if (labels[batch.first_id + k] < 0) {
        pending.push_back(b);
        break;
      }
    }
  }

  LlmClusterResult result;
  result.cached_batches = batches.size() - pending.size();
  ChatCompletionClient client(endpoint);

  for (std::size_t start = 0; start < pending.size(); start += endpoint.parallelism) {
    const std::size_t stop = std::min(pending.size(), start + endpoint.parallelism);
    std::vector<std::future<std::string>> replies;
    for (std::size_t w = start; w < stop; ++w) {
      const auto& prompt = batches[pending[w]].prompt;
      replies.push_back(std::async(std::launch::async, [&client, &prompt] { return client.complete(prompt); }));
    }
    std::string failure;
    for (std::size_t w = start; w < stop; ++w) {
      const auto& batch = batches[pending[w]];
      std::string text;
      try {
        text = replies[w - start].get();
      } catch (const std::exception& e) {
        if (failure.empty()) {
          failure = "batch " + std::to_string(pending[w] + 1) + " (candidates " + std::to_string(batch.first_id) +
                    ".." + std::to_string(batch.first_id + batch.count - 1) + "): " + e.what();
        }
        continue;
      }
      const auto parsed = parse_labels(text, batch.count, tmpl.cluster_count);
      for (std::size_t k = 0; k < batch.count; ++k) labels[batch.first_id + k] = parsed.labels[k];
      for (const auto pos : parsed.failures) result.fallback_ids.push_back(batch.first_id + pos - 1);
    }
    store_cache(cache_path, key, labels);
    if (!failure.empty()) {
      result.requests = client.requests_sent();
      throw NetworkError("LLM clustering failed at " + failure);
    }
  }

  result.requests = client.requests_sent();
  result.assignment.source = ClusterSource::llm;
  result.assignment.labels = std::move(labels);
  result.assignment.cluster_count = tmpl.cluster_count;
  return result;
}

}  // namespace lftree
