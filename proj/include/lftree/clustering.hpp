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

#ifndef LFTREE_CLUSTERING_HPP
#define LFTREE_CLUSTERING_HPP

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "lftree/core.hpp"
#include "lftree/rng.hpp"

namespace lftree {

enum class ClusterSource { kmeans, llm, file };

std::string to_string(ClusterSource source);

struct ClusterAssignment {
  ClusterSource source = ClusterSource::file;
  std::vector<int> labels;  // one per candidate, in [0, cluster_count)
  std::size_t cluster_count = 0;
};

// ---------------------------------------------------------------------------
// k-means

struct KMeansResult {
  ClusterAssignment assignment;
  std::vector<std::vector<double>> centers;
  /// Inertia after each assignment step; non-increasing.
  std::vector<double> inertia_history;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Lloyd's algorithm on the standardized features. The first center is drawn
/// from `rng`, the rest are chosen farthest-point first. A cluster that empties
/// is reseeded at the point farthest from its assigned center.
KMeansResult kmeans_cluster(const CandidatePool& pool, std::size_t clusters, RngHandle& rng,
                            std::size_t max_iters = 100);

// ---------------------------------------------------------------------------
// LLM prompting

inline constexpr std::string_view kMoleculePlaceholder = "{{MOLECULES}}";
inline constexpr std::string_view kResponseInstruction =
    "Respond strictly with the counter and numerical cluster labels only.";

struct PromptTemplate {
  std::string task;
  std::string text;  // contains kMoleculePlaceholder
  std::size_t batch_size = 50;
  std::size_t cluster_count = 5;

  /// Reads a plain-text template; the task name defaults to the file stem.
  static PromptTemplate load(const std::filesystem::path& path, std::string task = {});
  /// Template shipped with the library, e.g. "redoxmer" or "redoxmer_variant2".
  static PromptTemplate builtin(const std::string& task);
  static std::vector<std::string> builtin_tasks();

  [[nodiscard]] std::uint64_t hash() const;
  void validate() const;
};

struct PromptBatch {
  CandidateId first_id = 0;
  std::size_t count = 0;
  std::string prompt;
};

/// Consecutive batches of the template batch size; each lists its molecules
/// as "<counter>: <text>" with counters starting at 1.
std::vector<PromptBatch> render_prompt_batches(const PromptTemplate& tmpl, const CandidatePool& pool);
std::vector<std::string> render_prompts(const PromptTemplate& tmpl, const CandidatePool& pool);

struct ParsedLabels {
  std::vector<int> labels;            // exactly `expected` entries
  std::vector<std::size_t> failures;  // 1-based counters that fell back
};

/// Extracts "<counter> <label>" pairs (separated by ':', '.', ',' or
/// whitespace). Missing counters and out-of-range labels fall back to the
/// middle label C / 2. Never throws.
ParsedLabels parse_labels(std::string_view response, std::size_t expected, std::size_t clusters);

struct LlmEndpointConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o";
  std::string api_key_env = "OPENAI_API_KEY";
  double timeout_seconds = 60.0;
  std::size_t max_retries = 3;
  double temperature = 0.0;
  double initial_backoff_seconds = 1.0;
  double backoff_factor = 2.0;
  std::size_t parallelism = 1;

  void validate() const;
};

/// Minimal chat-completion client: one user message per request, bearer
/// authentication from the configured environment variable, exponential
/// backoff on transport errors and non-2xx responses.
class ChatCompletionClient {
 public:
  explicit ChatCompletionClient(LlmEndpointConfig config);

  /// Returns choices[0].message.content, or an empty string when a 2xx reply
  /// does not have that shape. Throws NetworkError once retries run out.
  std::string complete(const std::string& prompt);

  [[nodiscard]] std::size_t requests_sent() const { return requests_.load(); }

 private:
  LlmEndpointConfig config_;
  std::string scheme_host_;
  std::string path_;
  std::atomic<std::size_t> requests_{0};
};

struct LlmClusterResult {
  ClusterAssignment assignment;
  std::size_t requests = 0;        // HTTP attempts, retries included
  std::size_t cached_batches = 0;
  std::vector<CandidateId> fallback_ids;  // candidates labelled by the parse fallback
};

/// Labels every candidate through the endpoint, batch by batch. Batches whose
/// labels are all in the cache at `cache_path` are not requested; new labels
/// are written back after each batch, so an interrupted run keeps its
/// progress and a complete cache replays with zero requests.
LlmClusterResult llm_cluster(const CandidatePool& pool, const PromptTemplate& tmpl,
                             const LlmEndpointConfig& endpoint,
                             const std::filesystem::path& cache_path);

// ---------------------------------------------------------------------------
// Label files

/// CSV with header `id,label`, one row per candidate.
void write_label_file(const std::filesystem::path& path, const std::vector<int>& labels);
/// Reads a complete label file for a pool of `pool_size` candidates.
std::vector<int> read_label_file(const std::filesystem::path& path, std::size_t pool_size);

}  // namespace lftree

#endif  // LFTREE_CLUSTERING_HPP
