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

#include "lftree/classifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <numeric>

#include <json.hpp>

#include "lftree/error.hpp"

namespace lftree {
namespace {

constexpr std::size_t H = kHiddenUnits;

// Offsets into the flat parameter vector.
struct Layout {
  std::size_t d;
  std::size_t w1() const { return 0; }
  std::size_t b1() const { return H * d; }
  std::size_t w2() const { return b1() + H; }
  std::size_t b2() const { return w2() + H * H; }
  std::size_t w3() const { return b2() + H; }
  std::size_t b3() const { return w3() + H; }
  std::size_t total() const { return b3() + 1; }
};

// Activations of one forward pass, kept for backpropagation.
struct Forward {
  std::array<double, H> a1{};
  std::array<double, H> h1{};
  std::array<double, H> a2{};
  std::array<double, H> h2{};
  double z = 0.0;
};

void forward(const double* p, const Layout& L, std::span<const double> x, Forward& f) {
  const double* w1 = p + L.w1();
  const double* b1 = p + L.b1();
  for (std::size_t i = 0; i < H; ++i) {
    double acc = b1[i];
    const double* row = w1 + i * L.d;
    for (std::size_t j = 0; j < L.d; ++j) acc += row[j] * x[j];
    f.a1[i] = acc;
    f.h1[i] = acc > 0.0 ? acc : 0.0;
  }
  const double* w2 = p + L.w2();
  const double* b2 = p + L.b2();
  for (std::size_t i = 0; i < H; ++i) {
    double acc = b2[i];
    const double* row = w2 + i * H;
    for (std::size_t j = 0; j < H; ++j) acc += row[j] * f.h1[j];
    f.a2[i] = acc;
    f.h2[i] = acc > 0.0 ? acc : 0.0;
  }
  const double* w3 = p + L.w3();
  double z = p[L.b3()];
  for (std::size_t i = 0; i < H; ++i) z += w3[i] * f.h2[i];
  f.z = z;
}

void check_dim(const ClassifierParams& params, std::span<const double> x) {
  if (x.size() != params.input_dim()) {
    throw InvalidArgument("feature vector has dimension " + std::to_string(x.size()) +
                          ", classifier expects " + std::to_string(params.input_dim()));
  }
}

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

}  // namespace

std::string to_string(UtilityKind kind) { return kind == UtilityKind::PI ? "PI" : "EI"; }

UtilityKind parse_utility_kind(const std::string& text) {
  if (text == "PI" || text == "pi") return UtilityKind::PI;
  if (text == "EI" || text == "ei") return UtilityKind::EI;
  throw InvalidArgument("unknown utility '" + text + "' (expected PI or EI)");
}

double UtilitySpec::operator()(double y) const {
  if (kind == UtilityKind::PI) return y > threshold ? 1.0 : 0.0;
  return std::max(y - threshold, 0.0);
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw InvalidArgument("train config: batch size must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("train config: learning rate must be positive");
  }
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw InvalidArgument("train config: weight decay must be non-negative");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw InvalidArgument("train config: gamma must lie in (0, 1)");
  }
}

ClassifierParams::ClassifierParams(std::size_t input_dim)
    : input_dim_(input_dim), values_(parameter_count(input_dim), 0.0) {
  if (input_dim == 0) throw InvalidArgument("classifier input dimension must be positive");
}

std::size_t ClassifierParams::parameter_count(std::size_t input_dim) {
  return Layout{input_dim}.total();
}

ClassifierParams ClassifierParams::random(std::size_t input_dim, RngHandle& rng) {
  ClassifierParams params(input_dim);
  const Layout L{input_dim};
  auto fill = [&](std::size_t begin, std::size_t end, std::size_t fan_in) {
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    for (std::size_t i = begin; i < end; ++i) params.values_[i] = rng.uniform(-bound, bound);
  };
  fill(L.w1(), L.w2(), input_dim);  // W1 and b1
  fill(L.w2(), L.w3(), H);          // W2 and b2
  fill(L.w3(), L.total(), H);       // w3 and b3
  return params;
}

double ClassifierParams::logit(std::span<const double> x) const {
  check_dim(*this, x);
  Forward f;
  forward(values_.data(), Layout{input_dim_}, x, f);
  return f.z;
}

bool ClassifierParams::bitwise_equal(const ClassifierParams& other) const {
  return input_dim_ == other.input_dim_ && values_.size() == other.values_.size() &&
         std::memcmp(values_.data(), other.values_.data(), values_.size() * sizeof(double)) == 0;
}

bool ClassifierParams::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

std::string ClassifierParams::to_json() const {
  nlohmann::json doc;
  doc["format"] = "lftree.classifier";
  doc["version"] = 1;
  doc["input_dim"] = input_dim_;
  doc["layers"] = {input_dim_, H, H, 1};
  doc["values"] = values_;
  return doc.dump();
}

ClassifierParams ClassifierParams::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("classifier snapshot: ") + e.what());
  }
  if (doc.value("format", "") != "lftree.classifier" || doc.value("version", 0) != 1) {
    throw InvalidArgument("classifier snapshot: unsupported format or version");
  }
  const auto d = doc.at("input_dim").get<std::size_t>();
  const auto layers = doc.at("layers").get<std::vector<std::size_t>>();
  if (layers != std::vector<std::size_t>{d, H, H, 1}) {
    throw InvalidArgument("classifier snapshot: unexpected layer sizes");
  }
  ClassifierParams params(d);
  auto values = doc.at("values").get<std::vector<double>>();
  if (values.size() != params.size()) {
    throw InvalidArgument("classifier snapshot: wrong parameter count");
  }
  params.values_ = std::move(values);
  return params;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double lfbo_loss(const ClassifierParams& params, std::span<const LabeledPoint> batch,
                 const UtilitySpec& utility) {
  if (batch.empty()) throw InvalidArgument("lfbo_loss: empty batch");
  const Layout L{params.input_dim()};
  Forward f;
  double total = 0.0;
  for (const auto& point : batch) {
    check_dim(params, point.features);
    forward(params.values().data(), L, point.features, f);
    const double p = clamp_probability(sigmoid(f.z));
    total += -utility(point.y) * std::log(p) - std::log(1.0 - p);
  }
  return total / static_cast<double>(batch.size());
}

double lfbo_loss_and_gradient(const ClassifierParams& params, std::span<const LabeledPoint> batch,
                              const UtilitySpec& utility, std::vector<double>& gradient,
                              double weight_scale) {
  if (batch.empty()) throw InvalidArgument("lfbo_loss: empty batch");
  const Layout L{params.input_dim()};
  const double* p = params.values().data();
  gradient.assign(L.total(), 0.0);
  double* g = gradient.data();
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  Forward f;
  std::array<double, H> d2{};
  std::array<double, H> d1{};
  double total = 0.0;
  for (const auto& point : batch) {
    check_dim(params, point.features);
    forward(p, L, point.features, f);
    const double raw = sigmoid(f.z);
    const double prob = clamp_probability(raw);
    const double u = weight_scale * utility(point.y);
    total += -u * std::log(prob) - std::log(1.0 - prob);
    // d/dz of the per-sample loss; the clamp has zero slope outside its range.
    const bool clamped = raw < kProbabilityClamp || raw > 1.0 - kProbabilityClamp;
    const double dz = clamped ? 0.0 : (prob * (1.0 + u) - u) * inv_b;
    if (dz == 0.0) continue;

    const double* w3 = p + L.w3();
    for (std::size_t i = 0; i < H; ++i) {
      g[L.w3() + i] += dz * f.h2[i];
      d2[i] = f.a2[i] > 0.0 ? dz * w3[i] : 0.0;
    }
    g[L.b3()] += dz;

    const double* w2 = p + L.w2();
    d1.fill(0.0);
    for (std::size_t i = 0; i < H; ++i) {
      if (d2[i] == 0.0) continue;
      double* grow = g + L.w2() + i * H;
      const double* wrow = w2 + i * H;
      for (std::size_t j = 0; j < H; ++j) {
        grow[j] += d2[i] * f.h1[j];
        d1[j] += wrow[j] * d2[i];
      }
      g[L.b2() + i] += d2[i];
    }
    for (std::size_t i = 0; i < H; ++i) {
      if (!(f.a1[i] > 0.0)) continue;
      double* grow = g + L.w1() + i * L.d;
      for (std::size_t j = 0; j < L.d; ++j) grow[j] += d1[i] * point.features[j];
      g[L.b1() + i] += d1[i];
    }
  }
  return total * inv_b;
}

ClassifierParams train(const ClassifierParams& initial, std::span<const LabeledPoint> data,
                       const UtilitySpec& utility, const TrainConfig& cfg, RngHandle& rng) {
  cfg.validate();
  if (data.empty()) throw InvalidArgument("train: no training data");
  ClassifierParams params = initial;
  if (cfg.epochs == 0) return params;

  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  const std::size_t n = params.size();
  std::vector<double> m(n, 0.0);
  std::vector<double> v(n, 0.0);
  std::vector<double> grad;
  double beta1_t = 1.0;
  double beta2_t = 1.0;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<LabeledPoint> batch;
  batch.reserve(std::min(cfg.batch_size, data.size()));

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(data[order[i]]);

      double scale = 1.0;
      if (cfg.normalize_ei_weights && utility.kind == UtilityKind::EI) {
        double sum = 0.0;
        for (const auto& pt : batch) sum += utility(pt.y);
        if (sum > 0.0) scale = static_cast<double>(batch.size()) / sum;
      }
      const double loss = lfbo_loss_and_gradient(params, batch, utility, grad, scale);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch));
      }

      beta1_t *= beta1;
      beta2_t *= beta2;
      auto theta = params.values();
      for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        const double m_hat = m[i] / (1.0 - beta1_t);
        const double v_hat = v[i] / (1.0 - beta2_t);
        theta[i] -= cfg.learning_rate * cfg.weight_decay * theta[i];
        theta[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + eps);
      }
    }
  }
  if (!params.all_finite()) {
    throw NumericError("non-finite parameters after epoch " + std::to_string(cfg.epochs - 1));
  }
  return params;
}

double predict(const ClassifierParams& params, std::span<const double> features) {
  return clamp_probability(sigmoid(params.logit(features)));
}

std::vector<double> predict_batch(const ClassifierParams& params,
                                  const std::vector<std::span<const double>>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(predict(params, row));
  return out;
}

double odds(double probability) {
  const double p = clamp_probability(probability);
  return p / (1.0 - p);
}

double acquisition(const ClassifierParams& params, std::span<const double> features) {
  return odds(predict(params, features));
}

double relative_density_ratio(double r0, double gamma) {
  if (!(r0 > 0.0)) throw InvalidArgument("relative_density_ratio: r0 must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw InvalidArgument("relative_density_ratio: gamma must lie in [0, 1]");
  }
  return r0 / (gamma * r0 + (1.0 - gamma));
}

double quantile_threshold(std::span<const double> values, double gamma) {
  if (values.empty()) throw InvalidArgument("quantile_threshold: no values");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw InvalidArgument("quantile_threshold: gamma must lie in [0, 1]");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // Nearest rank of the (1 - gamma) quantile, guarded against 0.3 * 10 = 3.0000000000000004.
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - gamma) * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

}  // namespace lftree
