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
#include <map>
#include <regex>
#include <utility>

#include "lftree/clustering.hpp"
#include "lftree/error.hpp"
#include "lftree/io.hpp"

namespace lftree {

// Generated at configure time from the prompts/ directory.
const std::vector<std::pair<std::string_view, std::string_view>>& builtin_prompt_table();

namespace {

// Leading lines starting with '#' are file comments, not prompt text.
std::string strip_comment_header(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size() && text[pos] == '#') {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) return {};
    pos = nl + 1;
  }
  while (pos < text.size() && (text[pos] == '\n' || text[pos] == '\r')) ++pos;
  return std::string(text.substr(pos));
}

}  // namespace

PromptTemplate PromptTemplate::load(const std::filesystem::path& path, std::string task) {
  PromptTemplate tmpl;
  tmpl.task = task.empty() ? path.stem().string() : std::move(task);
  tmpl.text = strip_comment_header(read_file(path));
  tmpl.validate();
  return tmpl;
}

PromptTemplate PromptTemplate::builtin(const std::string& task) {
  for (const auto& [name, text] : builtin_prompt_table()) {
    if (name == task) {
      PromptTemplate tmpl;
      tmpl.task = task;
      tmpl.text = strip_comment_header(text);
      tmpl.validate();
      return tmpl;
    }
  }
  throw InvalidArgument("unknown prompt template '" + task + "'");
}

std::vector<std::string> PromptTemplate::builtin_tasks() {
  std::vector<std::string> names;
  for (const auto& entry : builtin_prompt_table()) names.emplace_back(entry.first);
  std::sort(names.begin(), names.end());
  return names;
}

std::uint64_t PromptTemplate::hash() const {
  std::uint64_t h = fnv1a64(text);
  h = fnv1a64(std::to_string(batch_size), h);
  return fnv1a64(std::to_string(cluster_count), h);
}

void PromptTemplate::validate() const {
  if (text.find(kMoleculePlaceholder) == std::string::npos) {
    throw InvalidArgument("prompt template '" + task + "' has no " +
                          std::string(kMoleculePlaceholder) + " placeholder");
  }
  if (text.find(kResponseInstruction) == std::string::npos) {
    throw InvalidArgument("prompt template '" + task + "' lacks the response-format instruction");
  }
  if (batch_size == 0) throw InvalidArgument("prompt batch size must be positive");
  if (cluster_count < 2) throw InvalidArgument("prompt cluster count must be at least 2");
}

std::vector<PromptBatch> render_prompt_batches(const PromptTemplate& tmpl, const CandidatePool& pool) {
  tmpl.validate();
  for (const auto& c : pool.candidates()) {
    if (!c.text || c.text->empty()) {
      throw InvalidArgument("candidate " + std::to_string(c.id) + " has no text for prompting");
    }
  }
  const auto at = tmpl.text.find(kMoleculePlaceholder);
  const std::string head = tmpl.text.substr(0, at);
  const std::string tail = tmpl.text.substr(at + kMoleculePlaceholder.size());

  std::vector<PromptBatch> batches;
  for (std::size_t first = 0; first < pool.size(); first += tmpl.batch_size) {
    const std::size_t count = std::min(tmpl.batch_size, pool.size() - first);
    std::string block;
    for (std::size_t k = 0; k < count; ++k) {
      if (k > 0) block += '\n';
      block += std::to_string(k + 1) + ": " + *pool.candidate(first + k).text;
    }
    batches.push_back({first, count, head + block + tail});
  }
  return batches;
}

std::vector<std::string> render_prompts(const PromptTemplate& tmpl, const CandidatePool& pool) {
  std::vector<std::string> prompts;
  for (auto& batch : render_prompt_batches(tmpl, pool)) prompts.push_back(std::move(batch.prompt));
  return prompts;
}

ParsedLabels parse_labels(std::string_view response, std::size_t expected, std::size_t clusters) {
  static const std::regex pair_re(R"(\b(\d+)(?:\s*[:.,)=-]\s*|\s+)(\d+))");
  const int fallback = static_cast<int>(clusters / 2);

  std::map<std::size_t, long long> found;
  std::size_t start = 0;
  while (start <= response.size()) {
    auto end = response.find('\n', start);
    if (end == std::string_view::npos) end = response.size();
    const std::string line(response.substr(start, end - start));
    for (auto it = std::sregex_iterator(line.begin(), line.end(), pair_re); it != std::sregex_iterator(); ++it) {
      const auto& m = *it;
      if (m[1].length() > 9 || m[2].length() > 9) continue;
      const auto counter = static_cast<std::size_t>(std::stoull(m[1].str()));
      if (counter < 1 || counter > expected) continue;
      found.emplace(counter, std::stoll(m[2].str()));
    }
    start = end + 1;
  }

  ParsedLabels parsed;
  parsed.labels.assign(expected, fallback);
  for (std::size_t k = 1; k <= expected; ++k) {
    const auto it = found.find(k);
    if (it == found.end() || it->second < 0 || it->second >= static_cast<long long>(clusters)) {
      parsed.failures.push_back(k);
    } else {
      parsed.labels[k - 1] = static_cast<int>(it->second);
    }
  }
  return parsed;
}

void write_label_file(const std::filesystem::path& path, const std::vector<int>& labels) {
  std::string out = "id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += std::to_string(i) + "," + std::to_string(labels[i]) + "\n";
  }
  write_file(path, out);
}

std::vector<int> read_label_file(const std::filesystem::path& path, std::size_t pool_size) {
  const auto records = parse_csv(read_file(path));
  if (records.empty() || records.front().fields.size() < 2 || trim(records.front().fields[0]) != "id" ||
      trim(records.front().fields[1]) != "label") {
    throw IngestionError(path.string() + ": expected header 'id,label'");
  }
  std::vector<int> labels(pool_size, -1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const auto where = path.string() + " line " + std::to_string(rec.line);
    if (rec.fields.size() != 2) throw IngestionError(where + ": expected 2 fields");
    long long id = 0;
    long long label = 0;
    try {
      std::size_t used = 0;
      const auto id_text = trim(rec.fields[0]);
      id = std::stoll(id_text, &used);
      if (used != id_text.size()) throw std::invalid_argument("id");
      const auto label_text = trim(rec.fields[1]);
      label = std::stoll(label_text, &used);
      if (used != label_text.size()) throw std::invalid_argument("label");
    } catch (const std::exception&) {
      throw IngestionError(where + ": non-integer field");
    }
    if (id < 0 || static_cast<std::size_t>(id) >= pool_size) {
      throw IngestionError(where + ": id " + std::to_string(id) + " outside the pool");
    }
    if (label < 0) throw IngestionError(where + ": negative label");
    if (labels[static_cast<std::size_t>(id)] >= 0) {
      throw IngestionError(where + ": duplicate id " + std::to_string(id));
    }
    labels[static_cast<std::size_t>(id)] = static_cast<int>(label);
  }
  for (std::size_t i = 0; i < pool_size; ++i) {
    if (labels[i] < 0) throw IngestionError(path.string() + ": no label for id " + std::to_string(i));
  }
  return labels;
}

}  // namespace lftree
