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

#include "lftree/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "lftree/error.hpp"
#include "lftree/io.hpp"

namespace lftree {
namespace {

std::string where(std::size_t line, const std::string& column) {
  return "row " + std::to_string(line) + ", column '" + column + "'";
}

double parse_real(const std::string& field, std::size_t line, const std::string& column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  while (last != first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw IngestionError(where(line, column) + ": not a number: '" + field + "'");
  }
  if (!std::isfinite(value)) {
    throw IngestionError(where(line, column) + ": non-finite value '" + field + "'");
  }
  return value;
}

long long parse_integer(const std::string& field, std::size_t line, const std::string& column) {
  long long value = 0;
  std::string trimmed = trim(field);
  auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
  if (ec != std::errc() || ptr != trimmed.data() + trimmed.size() || trimmed.empty()) {
    throw IngestionError(where(line, column) + ": not an integer: '" + field + "'");
  }
  return value;
}

struct RawRow {
  std::size_t line = 0;
  long long id = 0;
  Candidate candidate;
};

CandidatePool assemble(std::vector<RawRow> rows, ObjectiveSense sense) {
  if (rows.empty()) {
    throw IngestionError("candidate pool is empty");
  }
  std::map<long long, std::size_t> seen;
  for (const auto& row : rows) {
    if (row.id < 0) {
      throw IngestionError(where(row.line, "id") + ": negative id " + std::to_string(row.id));
    }
    auto [it, inserted] = seen.emplace(row.id, row.line);
    if (!inserted) {
      throw IngestionError(where(row.line, "id") + ": duplicate id " + std::to_string(row.id) +
                           " (first seen on row " + std::to_string(it->second) + ")");
    }
  }
  const auto n = static_cast<long long>(rows.size());
  for (long long expected = 0; expected < n; ++expected) {
    if (!seen.contains(expected)) {
      throw IngestionError("column 'id': missing id " + std::to_string(expected) +
                           " (ids must be contiguous 0.." + std::to_string(n - 1) + ")");
    }
  }
  std::vector<Candidate> candidates;
  candidates.reserve(rows.size());
  for (auto& row : rows) {
    row.candidate.id = static_cast<CandidateId>(row.id);
    candidates.push_back(std::move(row.candidate));
  }
  return CandidatePool(std::move(candidates), sense);
}

}  // namespace

std::string to_string(ObjectiveSense sense) {
  return sense == ObjectiveSense::maximize ? "maximize" : "minimize";
}

ObjectiveSense parse_objective_sense(const std::string& text) {
  if (text == "maximize" || text == "max") return ObjectiveSense::maximize;
  if (text == "minimize" || text == "min") return ObjectiveSense::minimize;
  throw InvalidArgument("unknown objective sense '" + text + "' (expected maximize or minimize)");
}

CandidatePool::CandidatePool(std::vector<Candidate> candidates, ObjectiveSense sense) {
  auto data = std::make_shared<Data>();
  data->sense = sense;
  if (candidates.empty()) {
    throw IngestionError("candidate pool is empty");
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].id != i) {
      throw IngestionError("candidate ids must be unique and contiguous 0..N-1; offending id " +
                           std::to_string(candidates[i].id));
    }
  }
  const std::size_t dim = candidates.front().features.size();
  if (dim == 0) {
    throw IngestionError("candidates need at least one feature");
  }
  int max_label = -1;
  bool any_label = false;
  bool all_labels = true;
  for (const auto& c : candidates) {
    if (c.features.size() != dim) {
      throw IngestionError("candidate " + std::to_string(c.id) + " has " +
                           std::to_string(c.features.size()) + " features, expected " +
                           std::to_string(dim));
    }
    for (std::size_t j = 0; j < dim; ++j) {
      if (!std::isfinite(c.features[j])) {
        throw IngestionError("candidate " + std::to_string(c.id) + ", column 'f" +
                             std::to_string(j) + "': non-finite feature");
      }
    }
    if (!std::isfinite(c.oracle_value)) {
      throw IngestionError("candidate " + std::to_string(c.id) + ", column 'y': non-finite value");
    }
    if (c.cluster) {
      if (*c.cluster < 0) {
        throw IngestionError("candidate " + std::to_string(c.id) +
                             ", column 'cluster': negative label");
      }
      any_label = true;
      max_label = std::max(max_label, *c.cluster);
    } else {
      all_labels = false;
    }
  }
  if (any_label && !all_labels) {
    throw IngestionError("column 'cluster': either every candidate or none must carry a label");
  }
  data->dim = dim;
  data->cluster_count = any_label ? static_cast<std::size_t>(max_label) + 1 : 0;

  const std::size_t n = candidates.size();
  data->stats.mean.assign(dim, 0.0);
  data->stats.stddev.assign(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) {
    double sum = 0.0;
    for (const auto& c : candidates) sum += c.features[j];
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& c : candidates) {
      const double d = c.features[j] - mean;
      ss += d * d;
    }
    data->stats.mean[j] = mean;
    data->stats.stddev[j] = std::sqrt(ss / static_cast<double>(n));
  }
  data->standardized.resize(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double sd = data->stats.stddev[j];
      data->standardized[i * dim + j] =
          sd > 0.0 ? (candidates[i].features[j] - data->stats.mean[j]) / sd : 0.0;
    }
  }
  data->candidates = std::move(candidates);
  data->optimum = -std::numeric_limits<double>::infinity();
  data_ = data;
  for (std::size_t i = 0; i < n; ++i) {
    data->optimum = std::max(data->optimum, internal_value(i));
  }
}

const Candidate& CandidatePool::candidate(CandidateId id) const {
  if (id >= size()) {
    throw InvalidArgument("candidate id " + std::to_string(id) + " outside pool of size " +
                          std::to_string(size()));
  }
  return data_->candidates[id];
}

std::span<const double> CandidatePool::features(CandidateId id) const {
  if (id >= size()) {
    throw InvalidArgument("candidate id " + std::to_string(id) + " outside pool of size " +
                          std::to_string(size()));
  }
  return {data_->standardized.data() + id * data_->dim, data_->dim};
}

double CandidatePool::internal_value(CandidateId id) const {
  return to_internal(candidate(id).oracle_value);
}

double CandidatePool::to_native(double internal) const {
  return data_->sense == ObjectiveSense::minimize ? -internal : internal;
}

int CandidatePool::cluster_of(CandidateId id) const {
  const auto& label = candidate(id).cluster;
  if (!label) {
    throw InvalidArgument("pool has no cluster labels");
  }
  return *label;
}

CandidatePool CandidatePool::with_clusters(const std::vector<int>& labels) const {
  if (labels.size() != size()) {
    throw InvalidArgument("label vector has " + std::to_string(labels.size()) +
                          " entries for a pool of " + std::to_string(size()));
  }
  std::vector<Candidate> copy = data_->candidates;
  for (std::size_t i = 0; i < copy.size(); ++i) {
    copy[i].cluster = labels[i];
  }
  return CandidatePool(std::move(copy), data_->sense);
}

CandidatePool CandidatePool::without_clusters() const {
  if (!has_clusters()) return *this;
  std::vector<Candidate> copy = data_->candidates;
  for (auto& c : copy) c.cluster.reset();
  return CandidatePool(std::move(copy), data_->sense);
}

std::uint64_t CandidatePool::digest() const {
  std::uint64_t h = fnv1a64(to_string(sense()));
  for (const auto& c : data_->candidates) {
    const std::uint64_t id = c.id;
    h = fnv1a64(&id, sizeof id, h);
    h = fnv1a64(&c.oracle_value, sizeof c.oracle_value, h);
    h = fnv1a64(c.features.data(), c.features.size() * sizeof(double), h);
    const int label = c.cluster.value_or(-1);
    h = fnv1a64(&label, sizeof label, h);
    if (c.text) h = fnv1a64(*c.text, h);
  }
  return h;
}

CandidatePool parse_pool_csv(const std::string& content, ObjectiveSense sense) {
  const auto records = parse_csv(content);
  if (records.empty()) {
    throw IngestionError("pool CSV has no header row");
  }
  const auto& header = records.front().fields;
  int id_col = -1;
  int y_col = -1;
  int text_col = -1;
  int cluster_col = -1;
  std::vector<int> feature_cols;
  std::map<std::size_t, int> features_by_index;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trim(header[c]);
    const int col = static_cast<int>(c);
    if (name == "id") {
      id_col = col;
    } else if (name == "y") {
      y_col = col;
    } else if (name == "text") {
      text_col = col;
    } else if (name == "cluster") {
      cluster_col = col;
    } else if (name.size() > 1 && name[0] == 'f' &&
               std::all_of(name.begin() + 1, name.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      const auto index = static_cast<std::size_t>(std::stoul(name.substr(1)));
      if (!features_by_index.emplace(index, col).second) {
        throw IngestionError(where(records.front().line, name) + ": duplicate feature column");
      }
    } else {
      throw IngestionError(where(records.front().line, name) + ": unknown column");
    }
  }
  if (id_col < 0) throw IngestionError("pool CSV header lacks an 'id' column");
  if (y_col < 0) throw IngestionError("pool CSV header lacks a 'y' column");
  if (features_by_index.empty()) throw IngestionError("pool CSV header has no feature columns");
  std::size_t expected = 0;
  for (const auto& [index, col] : features_by_index) {
    if (index != expected) {
      throw IngestionError("pool CSV header: feature columns must be f0..f{d-1}; missing f" +
                           std::to_string(expected));
    }
    feature_cols.push_back(col);
    ++expected;
  }

  std::vector<RawRow> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() == 1 && trim(rec.fields[0]).empty()) continue;
    if (rec.fields.size() != header.size()) {
      throw IngestionError("row " + std::to_string(rec.line) + ": expected " +
                           std::to_string(header.size()) + " fields, found " +
                           std::to_string(rec.fields.size()));
    }
    RawRow row;
    row.line = rec.line;
    row.id = parse_integer(rec.fields[id_col], rec.line, "id");
    row.candidate.oracle_value = parse_real(rec.fields[y_col], rec.line, "y");
    if (text_col >= 0) row.candidate.text = rec.fields[text_col];
    if (cluster_col >= 0) {
      const long long label = parse_integer(rec.fields[cluster_col], rec.line, "cluster");
      if (label < 0 || label > 1'000'000) {
        throw IngestionError(where(rec.line, "cluster") + ": label out of range");
      }
      row.candidate.cluster = static_cast<int>(label);
    }
    row.candidate.features.reserve(feature_cols.size());
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      row.candidate.features.push_back(
          parse_real(rec.fields[feature_cols[j]], rec.line, "f" + std::to_string(j)));
    }
    rows.push_back(std::move(row));
  }
  return assemble(std::move(rows), sense);
}

CandidatePool parse_pool_json(const std::string& content, ObjectiveSense sense) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw IngestionError(std::string("pool JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("candidates")) doc = doc.at("candidates");
  if (!doc.is_array()) {
    throw IngestionError("pool JSON must be an array of candidate objects");
  }
  std::vector<RawRow> rows;
  std::size_t record = 0;
  for (const auto& item : doc) {
    ++record;
    auto field_error = [&](const std::string& column, const std::string& what) {
      return IngestionError(where(record, column) + ": " + what);
    };
    if (!item.is_object()) throw field_error("*", "not an object");
    RawRow row;
    row.line = record;
    if (!item.contains("id") || !item["id"].is_number_integer()) {
      throw field_error("id", "missing or non-integer");
    }
    row.id = item["id"].get<long long>();
    if (!item.contains("y") || !item["y"].is_number()) throw field_error("y", "missing or non-numeric");
    row.candidate.oracle_value = item["y"].get<double>();
    if (!std::isfinite(row.candidate.oracle_value)) throw field_error("y", "non-finite value");
    if (item.contains("text") && !item["text"].is_null()) {
      row.candidate.text = item["text"].get<std::string>();
    }
    if (item.contains("cluster") && !item["cluster"].is_null()) {
      if (!item["cluster"].is_number_integer() || item["cluster"].get<long long>() < 0) {
        throw field_error("cluster", "must be a non-negative integer");
      }
      row.candidate.cluster = item["cluster"].get<int>();
    }
    if (item.contains("features")) {
      for (std::size_t j = 0; j < item["features"].size(); ++j) {
        const auto& v = item["features"][j];
        if (!v.is_number()) throw field_error("f" + std::to_string(j), "non-numeric");
        row.candidate.features.push_back(v.get<double>());
      }
    } else {
      for (std::size_t j = 0;; ++j) {
        const std::string key = "f" + std::to_string(j);
        if (!item.contains(key)) break;
        if (!item[key].is_number()) throw field_error(key, "non-numeric");
        row.candidate.features.push_back(item[key].get<double>());
      }
    }
    for (std::size_t j = 0; j < row.candidate.features.size(); ++j) {
      if (!std::isfinite(row.candidate.features[j])) {
        throw field_error("f" + std::to_string(j), "non-finite value");
      }
    }
    if (!rows.empty() && rows.front().candidate.features.size() != row.candidate.features.size()) {
      throw field_error("features", "ragged feature vector");
    }
    rows.push_back(std::move(row));
  }
  return assemble(std::move(rows), sense);
}

CandidatePool load_pool(const std::filesystem::path& path, ObjectiveSense sense) {
  const std::string content = read_file(path);
  if (path.extension() == ".json") {
    return parse_pool_json(content, sense);
  }
  return parse_pool_csv(content, sense);
}

std::string format_pool_csv(const CandidatePool& pool) {
  const bool has_text = std::any_of(pool.candidates().begin(), pool.candidates().end(),
                                    [](const Candidate& c) { return c.text.has_value(); });
  std::ostringstream out;
  out << "id,y";
  if (has_text) out << ",text";
  if (pool.has_clusters()) out << ",cluster";
  for (std::size_t j = 0; j < pool.dim(); ++j) out << ",f" << j;
  out << '\n';
  for (const auto& c : pool.candidates()) {
    out << c.id << ',' << format_double(c.oracle_value);
    if (has_text) out << ',' << csv_escape(c.text.value_or(""));
    if (pool.has_clusters()) out << ',' << *c.cluster;
    for (double f : c.features) out << ',' << format_double(f);
    out << '\n';
  }
  return out.str();
}

void write_pool_csv(const CandidatePool& pool, const std::filesystem::path& path) {
  write_file(path, format_pool_csv(pool));
}

double oracle_query(const CandidatePool& pool, CandidateId id) {
  if (id >= pool.size()) {
    throw InvalidArgument("oracle query for unknown candidate id " + std::to_string(id));
  }
  return pool.internal_value(id);
}

void ObservationSet::add(CandidateId id, double y) {
  if (!std::isfinite(y)) {
    throw InvalidArgument("observation for candidate " + std::to_string(id) + " is not finite");
  }
  if (!ids_.insert(id).second) {
    throw InvalidArgument("candidate " + std::to_string(id) + " observed twice");
  }
  best_ = observations_.empty() ? y : std::max(best_, y);
  observations_.push_back({id, y});
}

double ObservationSet::best_value() const {
  if (observations_.empty()) {
    throw InvalidArgument("best_value of an empty observation set");
  }
  return best_;
}

std::vector<std::size_t> allocate_round_robin(const std::vector<std::size_t>& cluster_sizes,
                                              std::size_t n) {
  std::vector<std::size_t> counts(cluster_sizes.size(), 0);
  std::size_t remaining = n;
  bool progressed = true;
  while (remaining > 0 && progressed) {
    progressed = false;
    for (std::size_t c = 0; c < cluster_sizes.size() && remaining > 0; ++c) {
      if (counts[c] < cluster_sizes[c]) {
        ++counts[c];
        --remaining;
        progressed = true;
      }
    }
  }
  return counts;
}

ObservationSet stratified_init(const CandidatePool& pool, std::size_t n, RngHandle& rng) {
  ObservationSet obs;
  if (!pool.has_clusters()) {
    for (std::size_t id : rng.sample_without_replacement(pool.size(), std::min(n, pool.size()))) {
      obs.add(id, oracle_query(pool, id));
    }
    return obs;
  }
  std::vector<std::vector<CandidateId>> members(pool.cluster_count());
  for (CandidateId id = 0; id < pool.size(); ++id) {
    members[static_cast<std::size_t>(pool.cluster_of(id))].push_back(id);
  }
  std::vector<std::size_t> sizes;
  sizes.reserve(members.size());
  for (const auto& m : members) sizes.push_back(m.size());
  const auto counts = allocate_round_robin(sizes, n);

  std::vector<std::vector<CandidateId>> drawn(members.size());
  for (std::size_t c = 0; c < members.size(); ++c) {
    for (std::size_t index : rng.sample_without_replacement(members[c].size(), counts[c])) {
      drawn[c].push_back(members[c][index]);
    }
  }
  // Interleave so the observation order mirrors the round-robin allocation.
  for (std::size_t round = 0;; ++round) {
    bool any = false;
    for (const auto& ids : drawn) {
      if (round < ids.size()) {
        obs.add(ids[round], oracle_query(pool, ids[round]));
        any = true;
      }
    }
    if (!any) break;
  }
  return obs;
}

}  // namespace lftree
