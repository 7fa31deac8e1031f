// Copyright 2026 The Mutrealism Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mutrealism/dataset.hpp"
#include "mutrealism/matrix.hpp"

namespace mutrealism {

enum class Activation { kRelu, kSigmoid, kTanh, kSoftmax, kLinear, kNone };
enum class Optimizer { kSgd, kSgdMomentum, kAdam };
enum class Loss { kCrossEntropy, kMse };
enum class WeightInit { kXavierUniform, kHeUniform, kZeros };

std::string_view to_string(Activation a) noexcept;
std::string_view to_string(Optimizer o) noexcept;
std::string_view to_string(Loss l) noexcept;
std::string_view to_string(WeightInit w) noexcept;

// Parsers throw Error(kSchema) on unknown names.
Activation parse_activation(std::string_view s);
Optimizer parse_optimizer(std::string_view s);
Loss parse_loss(std::string_view s);
WeightInit parse_weight_init(std::string_view s);

struct LayerSpec {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  Activation activation = Activation::kRelu;
  bool operator==(const LayerSpec&) const = default;
};

struct Architecture {
  std::vector<LayerSpec> layers;

  /// Throws Error(kSchema) unless non-empty, positive and chained.
  void validate() const;
  std::size_t input_dim() const { return layers.front().input_dim; }
  std::size_t output_dim() const { return layers.back().output_dim; }
  std::size_t parameter_count() const;
  /// Hex content hash over the layer list.
  std::string fingerprint() const;
  bool operator==(const Architecture&) const = default;

  /// Convenience: widths {in, h1, ..., out}; hidden layers use `hidden`,
  /// the last layer uses `head`.
  static Architecture mlp(std::span<const std::size_t> widths,
                          Activation hidden, Activation head);
};

struct LayerWeights {
  Matrix w;  // output_dim x input_dim
  std::vector<double> b;
  /// Layer replaced by an identity pass-through (layer deactivation).
  bool identity = false;
  bool operator==(const LayerWeights&) const = default;
};

/// Trained parameters. Immutable by convention once produced.
struct ModelWeights {
  Architecture architecture;
  std::vector<LayerWeights> layers;
  bool valid = true;

  std::string fingerprint() const { return architecture.fingerprint(); }
  /// Throws Error(kShapeMismatch) when shapes disagree with the architecture.
  void validate_shapes() const;
  bool all_finite() const;
  std::uint64_t content_hash() const;
  bool operator==(const ModelWeights&) const = default;
};

struct TrainSpec {
  Architecture architecture;
  Optimizer optimizer = Optimizer::kAdam;
  double learning_rate = 0.01;
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  Loss loss = Loss::kCrossEntropy;
  WeightInit weight_init = WeightInit::kXavierUniform;
  std::uint64_t seed = 0;

  /// Cross-entropy requires a softmax head; mse accepts any head. When
  /// `train_rows` is non-zero the batch size is checked against it.
  void validate(std::size_t train_rows = 0) const;
  std::uint64_t content_hash() const;
  bool operator==(const TrainSpec&) const = default;
};

struct PredictionBatch {
  Matrix probabilities;  // |T| x classes (raw head outputs for non-softmax heads)
  std::vector<std::size_t> predicted;
  /// Per-input loss; empty when no labels were supplied.
  std::vector<double> loss;
  bool valid = true;

  std::size_t size() const noexcept { return predicted.size(); }
  double accuracy(std::span<const std::size_t> labels) const;
  double mean_loss() const;
};

/// Index of the maximum; ties go to the lowest index.
std::size_t argmax(std::span<const double> xs) noexcept;

ModelWeights init_weights(const TrainSpec& spec, std::uint64_t instance_seed);

/// Never throws on non-finite values: the batch is flagged invalid instead.
PredictionBatch forward(const ModelWeights& weights, const Matrix& inputs);
PredictionBatch forward(const ModelWeights& weights, const Matrix& inputs,
                        std::span<const std::size_t> labels, Loss loss);

struct Gradients {
  std::vector<Matrix> dw;
  std::vector<std::vector<double>> db;

  static Gradients zeros_like(const ModelWeights& w);
  std::size_t size() const;
  double& at(std::size_t flat_index);
};

/// Mean loss over `rows` (all rows when empty) against dense `targets`
/// (|rows| x classes, usually one-hot), accumulating the analytic gradient
/// into `grad` when non-null. Reductions run in a fixed order.
double loss_and_gradient(const ModelWeights& weights, Loss loss,
                         const Matrix& inputs, const Matrix& targets,
                         std::span<const std::size_t> rows, Gradients* grad);

Matrix one_hot(std::span<const std::size_t> labels, std::size_t classes);

struct TrainHistory {
  std::vector<double> epoch_loss;  // mean loss per epoch
};

/// Mini-batch training on the dataset's training split. Batch order is drawn
/// from `instance_seed`; the final-epoch weights are returned. A non-finite
/// loss stops training and returns weights flagged invalid.
ModelWeights train(const TrainSpec& spec, const Dataset& data,
                   std::uint64_t instance_seed, TrainHistory* history = nullptr);

/// Flat parameter view used by gradient checking: layer by layer, weights
/// row-major then biases.
double& parameter_at(ModelWeights& weights, std::size_t flat_index);
std::size_t parameter_count(const ModelWeights& weights);

struct GradCheckOptions {
  double epsilon = 1e-5;
  std::size_t max_rows = 8;
  /// Applied to the analytic gradient before comparison (checker self-test).
  std::function<void(Gradients&)> tamper;
};

/// Max relative error between analytic and central-difference gradients at
/// a random point drawn from `spec.seed`. Relative error of one parameter is
/// |a - n| / max(|a|, |n|, 1e-6).
double grad_check(const TrainSpec& spec, const Dataset& data,
                  const GradCheckOptions& options = {});
inline double grad_check(const TrainSpec& spec, const Dataset& data,
                         double epsilon) {
  GradCheckOptions o;
  o.epsilon = epsilon;
  return grad_check(spec, data, o);
}

}  // namespace mutrealism
