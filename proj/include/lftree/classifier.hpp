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

#ifndef LFTREE_CLASSIFIER_HPP
#define LFTREE_CLASSIFIER_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lftree/rng.hpp"

namespace lftree {

inline constexpr std::size_t kHiddenUnits = 50;
/// Probabilities are clamped to [kProbabilityClamp, 1 - kProbabilityClamp].
inline constexpr double kProbabilityClamp = 1e-6;

enum class UtilityKind { PI, EI };

std::string to_string(UtilityKind kind);
UtilityKind parse_utility_kind(const std::string& text);

/// u(y; tau): indicator 1(y > tau) for PI, hinge max(y - tau, 0) for EI.
struct UtilitySpec {
  UtilityKind kind = UtilityKind::EI;
  double threshold = 0.0;

  [[nodiscard]] double operator()(double y) const;
};

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 256;
  double learning_rate = 1e-2;
  double weight_decay = 5e-4;
  double gamma = 0.5;
  /// Rescale EI weights to unit batch mean. Off by default.
  bool normalize_ei_weights = false;

  void validate() const;
};

/// One training example: a standardized feature row and its internal y.
struct LabeledPoint {
  std::span<const double> features;
  double y = 0.0;
};

/// Weights of the d -> 50 -> 50 -> 1 ReLU network with logistic output,
/// stored as one flat vector so optimizer and meta updates are elementwise.
///
/// Layout: W1 (50 x d, row-major), b1, W2 (50 x 50), b2, w3 (50), b3.
class ClassifierParams {
 public:
  ClassifierParams() = default;
  /// All-zero parameters.
  explicit ClassifierParams(std::size_t input_dim);

  /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer, biases included.
  static ClassifierParams random(std::size_t input_dim, RngHandle& rng);

  [[nodiscard]] std::size_t input_dim() const { return input_dim_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] std::span<double> values() { return values_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }

  /// Pre-sigmoid output.
  [[nodiscard]] double logit(std::span<const double> x) const;

  /// True when every parameter has the same bit pattern.
  [[nodiscard]] bool bitwise_equal(const ClassifierParams& other) const;
  [[nodiscard]] bool all_finite() const;

  /// Versioned JSON snapshot: {"format", "version", "input_dim", "layers", "values"}.
  [[nodiscard]] std::string to_json() const;
  static ClassifierParams from_json(const std::string& text);

  static std::size_t parameter_count(std::size_t input_dim);

 private:
  std::size_t input_dim_ = 0;
  std::vector<double> values_;
};

double sigmoid(double z);

/// Mean over the batch of -u(y) log pi(x) - log(1 - pi(x)), with pi clamped.
double lfbo_loss(const ClassifierParams& params, std::span<const LabeledPoint> batch,
                 const UtilitySpec& utility);

/// Loss and its gradient with respect to every parameter (same layout as
/// ClassifierParams::values). `weight_scale` multiplies every utility weight.
double lfbo_loss_and_gradient(const ClassifierParams& params, std::span<const LabeledPoint> batch,
                              const UtilitySpec& utility, std::vector<double>& gradient,
                              double weight_scale = 1.0);

/// Adam with decoupled weight decay over shuffled mini-batches. Returns a
/// trained copy; `initial` is not modified.
ClassifierParams train(const ClassifierParams& initial, std::span<const LabeledPoint> data,
                       const UtilitySpec& utility, const TrainConfig& cfg, RngHandle& rng);

/// Clamped logistic output in [1e-6, 1 - 1e-6].
double predict(const ClassifierParams& params, std::span<const double> features);
std::vector<double> predict_batch(const ClassifierParams& params,
                                  const std::vector<std::span<const double>>& rows);

/// Odds pi / (1 - pi) of a clamped probability.
double odds(double probability);
/// Likelihood-free acquisition value: odds of the classifier output.
double acquisition(const ClassifierParams& params, std::span<const double> features);

/// r0 / (gamma * r0 + 1 - gamma), i.e. (gamma + (1 - gamma) / r0)^-1.
double relative_density_ratio(double r0, double gamma);

/// Empirical threshold tau with about a gamma fraction of values strictly
/// above it: the (1 - gamma) nearest-rank quantile of the sorted values.
double quantile_threshold(std::span<const double> values, double gamma);

}  // namespace lftree

#endif  // LFTREE_CLASSIFIER_HPP
