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

#include "mutrealism/nn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "mutrealism/error.hpp"
#include "mutrealism/hash.hpp"
#include "mutrealism/rng.hpp"

namespace mutrealism {

namespace {

constexpr std::array<std::pair<Activation, std::string_view>, 6> kActivationNames{{
    {Activation::kRelu, "relu"},
    {Activation::kSigmoid, "sigmoid"},
    {Activation::kTanh, "tanh"},
    {Activation::kSoftmax, "softmax"},
    {Activation::kLinear, "linear"},
    {Activation::kNone, "none"},
}};
constexpr std::array<std::pair<Optimizer, std::string_view>, 3> kOptimizerNames{{
    {Optimizer::kSgd, "sgd"},
    {Optimizer::kSgdMomentum, "sgd_momentum"},
    {Optimizer::kAdam, "adam"},
}};
constexpr std::array<std::pair<Loss, std::string_view>, 2> kLossNames{{
    {Loss::kCrossEntropy, "cross_entropy"},
    {Loss::kMse, "mse"},
}};
constexpr std::array<std::pair<WeightInit, std::string_view>, 3> kInitNames{{
    {WeightInit::kXavierUniform, "xavier_uniform"},
    {WeightInit::kHeUniform, "he_uniform"},
    {WeightInit::kZeros, "zeros"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table,
                         E value) noexcept {
  for (const auto& [e, n] : table) {
    if (e == value) return n;
  }
  return "?";
}

template <typename E, std::size_t N>
E parse_name(const std::array<std::pair<E, std::string_view>, N>& table,
             std::string_view s, const char* what) {
  for (const auto& [e, n] : table) {
    if (n == s) return e;
  }
  throw Error(ErrorCode::kSchema,
              std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr double kMomentumBeta = 0.9;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;

void activate(Activation act, std::span<const double> z, std::span<double> out) {
  switch (act) {
    case Activation::kRelu:
      // NaN passes through so corrupted weights surface as invalid output.
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] <= 0.0 ? 0.0 : z[i];
      break;
    case Activation::kSigmoid:
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-z[i]));
      break;
    case Activation::kTanh:
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::tanh(z[i]);
      break;
    case Activation::kSoftmax: {
      double peak = *std::max_element(z.begin(), z.end());
      double total = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = std::exp(z[i] - peak);
        total += out[i];
      }
      for (std::size_t i = 0; i < z.size(); ++i) out[i] /= total;
      break;
    }
    case Activation::kLinear:
    case Activation::kNone:
      std::copy(z.begin(), z.end(), out.begin());
      break;
  }
}

// Maps dL/da to dL/dz in place, given the layer's pre-activation and output.
void activation_backward(Activation act, std::span<const double> z,
                         std::span<const double> a, std::span<double> grad) {
  switch (act) {
    case Activation::kRelu:
      for (std::size_t i = 0; i < z.size(); ++i) grad[i] *= z[i] > 0.0 ? 1.0 : 0.0;
      break;
    case Activation::kSigmoid:
      for (std::size_t i = 0; i < z.size(); ++i) grad[i] *= a[i] * (1.0 - a[i]);
      break;
    case Activation::kTanh:
      for (std::size_t i = 0; i < z.size(); ++i) grad[i] *= 1.0 - a[i] * a[i];
      break;
    case Activation::kSoftmax: {
      double dot = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) dot += grad[i] * a[i];
      for (std::size_t i = 0; i < a.size(); ++i) grad[i] = a[i] * (grad[i] - dot);
      break;
    }
    case Activation::kLinear:
    case Activation::kNone:
      break;
  }
}

double log_sum_exp(std::span<const double> z) {
  double peak = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - peak);
  return peak + std::log(total);
}

// Activations of one input through the network. z[l] and a[l] belong to
// layer l; a[-1] is the input row and is passed separately.
struct Trace {
  std::vector<std::vector<double>> z;
  std::vector<std::vector<double>> a;
};

void run_layers(const ModelWeights& weights, std::span<const double> input,
                Trace& trace) {
  const auto& layers = weights.architecture.layers;
  trace.z.resize(layers.size());
  trace.a.resize(layers.size());
  std::span<const double> prev = input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& spec = layers[l];
    const auto& lw = weights.layers[l];
    auto& z = trace.z[l];
    auto& a = trace.a[l];
    z.assign(spec.output_dim, 0.0);
    a.assign(spec.output_dim, 0.0);
    if (lw.identity) {
      std::copy(prev.begin(), prev.end(), z.begin());
      std::copy(prev.begin(), prev.end(), a.begin());
    } else {
      for (std::size_t o = 0; o < spec.output_dim; ++o) {
        double acc = lw.b[o];
        auto row = lw.w.row(o);
        for (std::size_t i = 0; i < spec.input_dim; ++i) acc += row[i] * prev[i];
        z[o] = acc;
      }
      activate(spec.activation, z, a);
    }
    prev = a;
  }
}

double row_loss(Loss loss, const Trace& trace, std::span<const double> target) {
  const auto& z = trace.z.back();
  const auto& a = trace.a.back();
  if (loss == Loss::kCrossEntropy) {
    double lse = log_sum_exp(z);
    double mass = 0.0, dot = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) {
      mass += target[c];
      dot += target[c] * z[c];
    }
    return mass * lse - dot;
  }
  double total = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    double d = a[c] - target[c];
    total += d * d;
  }
  return total / double(a.size());
}

void require_loss_compatible(const Architecture& arch, Loss loss) {
  if (loss == Loss::kCrossEntropy &&
      arch.layers.back().activation != Activation::kSoftmax) {
    throw Error(ErrorCode::kSchema, "cross_entropy loss requires a softmax head");
  }
}

void require_input_dim(const ModelWeights& weights, const Matrix& inputs) {
  if (inputs.cols() != weights.architecture.input_dim()) {
    throw Error(ErrorCode::kShapeMismatch,
                "input has " + std::to_string(inputs.cols()) +
                    " features, network expects " +
                    std::to_string(weights.architecture.input_dim()));
  }
}

}  // namespace

std::string_view to_string(Activation a) noexcept { return name_of(kActivationNames, a); }
std::string_view to_string(Optimizer o) noexcept { return name_of(kOptimizerNames, o); }
std::string_view to_string(Loss l) noexcept { return name_of(kLossNames, l); }
std::string_view to_string(WeightInit w) noexcept { return name_of(kInitNames, w); }

Activation parse_activation(std::string_view s) { return parse_name(kActivationNames, s, "activation"); }
Optimizer parse_optimizer(std::string_view s) { return parse_name(kOptimizerNames, s, "optimizer"); }
Loss parse_loss(std::string_view s) { return parse_name(kLossNames, s, "loss"); }
WeightInit parse_weight_init(std::string_view s) { return parse_name(kInitNames, s, "weight_init"); }

void Architecture::validate() const {
  if (layers.empty()) throw Error(ErrorCode::kSchema, "architecture has no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].input_dim == 0 || layers[l].output_dim == 0) {
      throw Error(ErrorCode::kSchema,
                  "layer " + std::to_string(l) + " has a zero dimension");
    }
    if (l > 0 && layers[l - 1].output_dim != layers[l].input_dim) {
      throw Error(ErrorCode::kSchema,
                  "layer " + std::to_string(l) + " input_dim " +
                      std::to_string(layers[l].input_dim) +
                      " does not match previous output_dim " +
                      std::to_string(layers[l - 1].output_dim));
    }
  }
}

std::size_t Architecture::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.output_dim * (l.input_dim + 1);
  return n;
}

std::string Architecture::fingerprint() const {
  Fnv1a h;
  h.u64(layers.size());
  for (const auto& l : layers) {
    h.u64(l.input_dim).u64(l.output_dim).text(to_string(l.activation));
  }
  return h.hex();
}

Architecture Architecture::mlp(std::span<const std::size_t> widths,
                               Activation hidden, Activation head) {
  Architecture a;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    bool last = i + 2 == widths.size();
    a.layers.push_back({widths[i], widths[i + 1], last ? head : hidden});
  }
  return a;
}

void ModelWeights::validate_shapes() const {
  architecture.validate();
  if (layers.size() != architecture.layers.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "weights have " + std::to_string(layers.size()) +
                    " layers, architecture declares " +
                    std::to_string(architecture.layers.size()));
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& s = architecture.layers[l];
    const auto& w = layers[l];
    if (w.w.rows() != s.output_dim || w.w.cols() != s.input_dim ||
        w.b.size() != s.output_dim) {
      throw Error(ErrorCode::kShapeMismatch,
                  "layer " + std::to_string(l) + " weight shape mismatch");
    }
    if (w.identity && s.input_dim != s.output_dim) {
      throw Error(ErrorCode::kShapeMismatch,
                  "identity layer " + std::to_string(l) + " is not square");
    }
  }
}

bool ModelWeights::all_finite() const {
  for (const auto& l : layers) {
    for (double v : l.w.flat()) {
      if (!std::isfinite(v)) return false;
    }
    for (double v : l.b) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::uint64_t ModelWeights::content_hash() const {
  Fnv1a h;
  h.text(fingerprint());
  for (const auto& l : layers) {
    h.values(l.w.flat());
    h.values(std::span<const double>(l.b));
    h.u64(l.identity ? 1 : 0);
  }
  h.u64(valid ? 1 : 0);
  return h.digest();
}

void TrainSpec::validate(std::size_t train_rows) const {
  architecture.validate();
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::kSchema, "learning_rate must be a positive finite number");
  }
  if (epochs < 1) throw Error(ErrorCode::kSchema, "epochs must be >= 1");
  if (batch_size < 1) throw Error(ErrorCode::kSchema, "batch_size must be >= 1");
  if (train_rows > 0 && batch_size > train_rows) {
    throw Error(ErrorCode::kSchema,
                "batch_size " + std::to_string(batch_size) +
                    " exceeds training-set size " + std::to_string(train_rows));
  }
  require_loss_compatible(architecture, loss);
}

std::uint64_t TrainSpec::content_hash() const {
  Fnv1a h;
  h.text(architecture.fingerprint())
      .text(to_string(optimizer))
      .f64(learning_rate)
      .u64(epochs)
      .u64(batch_size)
      .text(to_string(loss))
      .text(to_string(weight_init))
      .u64(seed);
  return h.digest();
}

std::size_t argmax(std::span<const double> xs) noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] > xs[best]) best = i;
  }
  return best;
}

double PredictionBatch::accuracy(std::span<const std::size_t> labels) const {
  if (predicted.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == labels[i]) ++hits;
  }
  return double(hits) / double(predicted.size());
}

double PredictionBatch::mean_loss() const {
  if (loss.empty()) return 0.0;
  double total = 0.0;
  for (double v : loss) total += v;
  return total / double(loss.size());
}

ModelWeights init_weights(const TrainSpec& spec, std::uint64_t instance_seed) {
  spec.architecture.validate();
  ModelWeights w;
  w.architecture = spec.architecture;
  RandomStream rng(derive_seed(instance_seed, "init", spec.seed));
  for (const auto& l : spec.architecture.layers) {
    LayerWeights lw;
    lw.w = Matrix(l.output_dim, l.input_dim);
    lw.b.assign(l.output_dim, 0.0);
    double limit = 0.0;
    switch (spec.weight_init) {
      case WeightInit::kXavierUniform:
        limit = std::sqrt(6.0 / double(l.input_dim + l.output_dim));
        break;
      case WeightInit::kHeUniform:
        limit = std::sqrt(6.0 / double(l.input_dim));
        break;
      case WeightInit::kZeros:
        break;
    }
    if (limit > 0.0) {
      for (double& v : lw.w.flat()) v = rng.uniform(-limit, limit);
    }
    w.layers.push_back(std::move(lw));
  }
  return w;
}

PredictionBatch forward(const ModelWeights& weights, const Matrix& inputs) {
  require_input_dim(weights, inputs);
  const std::size_t classes = weights.architecture.output_dim();
  PredictionBatch out;
  out.probabilities = Matrix(inputs.rows(), classes);
  out.predicted.resize(inputs.rows());
  Trace trace;
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    run_layers(weights, inputs.row(r), trace);
    const auto& a = trace.a.back();
    auto dst = out.probabilities.row(r);
    for (std::size_t c = 0; c < classes; ++c) {
      dst[c] = a[c];
      if (!std::isfinite(a[c])) out.valid = false;
    }
    out.predicted[r] = argmax(dst);
  }
  if (!weights.valid) out.valid = false;
  return out;
}

PredictionBatch forward(const ModelWeights& weights, const Matrix& inputs,
                        std::span<const std::size_t> labels, Loss loss) {
  require_input_dim(weights, inputs);
  require_loss_compatible(weights.architecture, loss);
  if (labels.size() != inputs.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "label count differs from input rows");
  }
  const std::size_t classes = weights.architecture.output_dim();
  PredictionBatch out;
  out.probabilities = Matrix(inputs.rows(), classes);
  out.predicted.resize(inputs.rows());
  out.loss.resize(inputs.rows());
  Trace trace;
  std::vector<double> target(classes, 0.0);
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    run_layers(weights, inputs.row(r), trace);
    const auto& a = trace.a.back();
    auto dst = out.probabilities.row(r);
    for (std::size_t c = 0; c < classes; ++c) {
      dst[c] = a[c];
      if (!std::isfinite(a[c])) out.valid = false;
    }
    out.predicted[r] = argmax(dst);
    std::fill(target.begin(), target.end(), 0.0);
    if (labels[r] < classes) target[labels[r]] = 1.0;
    out.loss[r] = row_loss(loss, trace, target);
    if (!std::isfinite(out.loss[r])) out.valid = false;
  }
  if (!weights.valid) out.valid = false;
  return out;
}

Gradients Gradients::zeros_like(const ModelWeights& w) {
  Gradients g;
  for (const auto& l : w.layers) {
    g.dw.emplace_back(l.w.rows(), l.w.cols());
    g.db.emplace_back(l.b.size(), 0.0);
  }
  return g;
}

std::size_t Gradients::size() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < dw.size(); ++l) n += dw[l].flat().size() + db[l].size();
  return n;
}

double& Gradients::at(std::size_t flat_index) {
  for (std::size_t l = 0; l < dw.size(); ++l) {
    auto w = dw[l].flat();
    if (flat_index < w.size()) return w[flat_index];
    flat_index -= w.size();
    if (flat_index < db[l].size()) return db[l][flat_index];
    flat_index -= db[l].size();
  }
  throw Error(ErrorCode::kInvalidArgument, "gradient index out of range");
}

std::size_t parameter_count(const ModelWeights& weights) {
  std::size_t n = 0;
  for (const auto& l : weights.layers) n += l.w.flat().size() + l.b.size();
  return n;
}

double& parameter_at(ModelWeights& weights, std::size_t flat_index) {
  for (auto& l : weights.layers) {
    auto w = l.w.flat();
    if (flat_index < w.size()) return w[flat_index];
    flat_index -= w.size();
    if (flat_index < l.b.size()) return l.b[flat_index];
    flat_index -= l.b.size();
  }
  throw Error(ErrorCode::kInvalidArgument, "parameter index out of range");
}

Matrix one_hot(std::span<const std::size_t> labels, std::size_t classes) {
  Matrix m(labels.size(), classes);
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] < classes) m(r, labels[r]) = 1.0;
  }
  return m;
}

double loss_and_gradient(const ModelWeights& weights, Loss loss,
                         const Matrix& inputs, const Matrix& targets,
                         std::span<const std::size_t> rows, Gradients* grad) {
  require_input_dim(weights, inputs);
  require_loss_compatible(weights.architecture, loss);
  const auto& layers = weights.architecture.layers;
  const Activation head = layers.back().activation;
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(inputs.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    rows = all;
  }
  const double scale = 1.0 / double(rows.size());
  double total = 0.0;
  Trace trace;
  std::vector<double> delta, prev_delta;
  for (std::size_t r : rows) {
    auto input = inputs.row(r);
    auto target = targets.row(r);
    run_layers(weights, input, trace);
    total += row_loss(loss, trace, target);
    if (grad == nullptr) continue;

    const auto& a_out = trace.a.back();
    delta.assign(a_out.size(), 0.0);
    if (loss == Loss::kCrossEntropy) {
      double mass = 0.0;
      for (double t : target) mass += t;
      for (std::size_t c = 0; c < a_out.size(); ++c) delta[c] = a_out[c] * mass - target[c];
    } else {
      for (std::size_t c = 0; c < a_out.size(); ++c) {
        delta[c] = 2.0 * (a_out[c] - target[c]) / double(a_out.size());
      }
      activation_backward(head, trace.z.back(), a_out, delta);
    }

    for (std::size_t l = layers.size(); l-- > 0;) {
      const auto& lw = weights.layers[l];
      std::span<const double> below =
          l == 0 ? input : std::span<const double>(trace.a[l - 1]);
      if (lw.identity) {
        prev_delta = delta;
      } else {
        auto& dw = grad->dw[l];
        auto& db = grad->db[l];
        for (std::size_t o = 0; o < layers[l].output_dim; ++o) {
          double d = delta[o] * scale;
          db[o] += d;
          auto grow = dw.row(o);
          for (std::size_t i = 0; i < layers[l].input_dim; ++i) grow[i] += d * below[i];
        }
        if (l == 0) break;
        prev_delta.assign(layers[l].input_dim, 0.0);
        for (std::size_t o = 0; o < layers[l].output_dim; ++o) {
          auto wrow = lw.w.row(o);
          for (std::size_t i = 0; i < layers[l].input_dim; ++i) {
            prev_delta[i] += wrow[i] * delta[o];
          }
        }
      }
      if (l == 0) break;
      // Identity layers skip their activation in the forward pass.
      if (!weights.layers[l - 1].identity) {
        activation_backward(layers[l - 1].activation, trace.z[l - 1],
                            trace.a[l - 1], prev_delta);
      }
      std::swap(delta, prev_delta);
    }
  }
  return total * scale;
}

ModelWeights train(const TrainSpec& spec, const Dataset& data,
                   std::uint64_t instance_seed, TrainHistory* history) {
  const Split& split = *data.train;
  spec.validate(split.size());
  if (split.features.cols() != spec.architecture.input_dim()) {
    throw Error(ErrorCode::kShapeMismatch,
                "dataset has " + std::to_string(split.features.cols()) +
                    " features, architecture expects " +
                    std::to_string(spec.architecture.input_dim()));
  }
  if (data.class_count != spec.architecture.output_dim()) {
    throw Error(ErrorCode::kShapeMismatch,
                "dataset has " + std::to_string(data.class_count) +
                    " classes, architecture outputs " +
                    std::to_string(spec.architecture.output_dim()));
  }

  ModelWeights weights = init_weights(spec, instance_seed);
  const Matrix targets = one_hot(split.labels, data.class_count);
  RandomStream order_rng(derive_seed(instance_seed, "batch-order", spec.seed));

  Gradients m = Gradients::zeros_like(weights);
  Gradients v = Gradients::zeros_like(weights);
  const std::size_t param_count = parameter_count(weights);
  std::uint64_t step = 0;

  std::vector<std::size_t> order(split.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (history) history->epoch_loss.clear();

  for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    double epoch_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += spec.batch_size) {
      std::size_t stop = std::min(order.size(), start + spec.batch_size);
      std::span<const std::size_t> batch(order.data() + start, stop - start);
      Gradients g = Gradients::zeros_like(weights);
      double batch_loss =
          loss_and_gradient(weights, spec.loss, split.features, targets, batch, &g);
      if (!std::isfinite(batch_loss)) {
        weights.valid = false;
        return weights;
      }
      epoch_total += batch_loss * double(batch.size());
      ++step;
      const double lr = spec.learning_rate;
      const double bias1 = 1.0 - std::pow(kAdamBeta1, double(step));
      const double bias2 = 1.0 - std::pow(kAdamBeta2, double(step));
      for (std::size_t p = 0; p < param_count; ++p) {
        double gp = g.at(p);
        double& wp = parameter_at(weights, p);
        switch (spec.optimizer) {
          case Optimizer::kSgd:
            wp -= lr * gp;
            break;
          case Optimizer::kSgdMomentum: {
            double& vel = m.at(p);
            vel = kMomentumBeta * vel + gp;
            wp -= lr * vel;
            break;
          }
          case Optimizer::kAdam: {
            double& m1 = m.at(p);
            double& m2 = v.at(p);
            m1 = kAdamBeta1 * m1 + (1.0 - kAdamBeta1) * gp;
            m2 = kAdamBeta2 * m2 + (1.0 - kAdamBeta2) * gp * gp;
            wp -= lr * (m1 / bias1) / (std::sqrt(m2 / bias2) + kAdamEpsilon);
            break;
          }
        }
      }
    }
    if (history) history->epoch_loss.push_back(epoch_total / double(order.size()));
    if (!weights.all_finite()) {
      weights.valid = false;
      return weights;
    }
  }
  return weights;
}

double grad_check(const TrainSpec& spec, const Dataset& data,
                  const GradCheckOptions& options) {
  TrainSpec point = spec;
  if (point.weight_init == WeightInit::kZeros) point.weight_init = WeightInit::kXavierUniform;
  ModelWeights weights = init_weights(point, spec.seed);
  RandomStream rng(derive_seed(spec.seed, "grad-check"));
  for (auto& l : weights.layers) {
    for (double& b : l.b) b = rng.uniform(-0.5, 0.5);
  }

  const Split& split = *data.train;
  std::size_t rows = std::min(options.max_rows, split.size());
  std::vector<std::size_t> picked(rows);
  std::iota(picked.begin(), picked.end(), std::size_t{0});
  const Matrix targets = one_hot(split.labels, data.class_count);

  Gradients analytic = Gradients::zeros_like(weights);
  loss_and_gradient(weights, spec.loss, split.features, targets, picked, &analytic);
  if (options.tamper) options.tamper(analytic);

  double worst = 0.0;
  const std::size_t n = parameter_count(weights);
  for (std::size_t p = 0; p < n; ++p) {
    double& wp = parameter_at(weights, p);
    const double saved = wp;
    wp = saved + options.epsilon;
    double plus = loss_and_gradient(weights, spec.loss, split.features, targets, picked, nullptr);
    wp = saved - options.epsilon;
    double minus = loss_and_gradient(weights, spec.loss, split.features, targets, picked, nullptr);
    wp = saved;
    double numeric = (plus - minus) / (2.0 * options.epsilon);
    double a = analytic.at(p);
    double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  }
  return worst;
}

}  // namespace mutrealism
