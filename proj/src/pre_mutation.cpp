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

#include "mutrealism/pre_mutation.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "mutrealism/error.hpp"
#include "mutrealism/hash.hpp"

namespace mutrealism {

namespace {

constexpr std::array<std::pair<PreOperator, std::string_view>, 12> kNames{{
    {PreOperator::kTCL, "TCL"}, {PreOperator::kTRD, "TRD"}, {PreOperator::kTAN, "TAN"},
    {PreOperator::kTUD, "TUD"}, {PreOperator::kHLR, "HLR"}, {PreOperator::kHNE, "HNE"},
    {PreOperator::kHBS, "HBS"}, {PreOperator::kACH, "ACH"}, {PreOperator::kARM, "ARM"},
    {PreOperator::kLCH, "LCH"}, {PreOperator::kWCI, "WCI"}, {PreOperator::kOCH, "OCH"},
}};

bool is_rate_operator(PreOperator op) {
  return op == PreOperator::kTCL || op == PreOperator::kTRD ||
         op == PreOperator::kTAN || op == PreOperator::kTUD;
}

bool is_factor_operator(PreOperator op) {
  return op == PreOperator::kHLR || op == PreOperator::kHNE || op == PreOperator::kHBS;
}

bool is_name_operator(PreOperator op) {
  return op == PreOperator::kACH || op == PreOperator::kLCH ||
         op == PreOperator::kWCI || op == PreOperator::kOCH;
}

double number(const ParamValue& p) { return std::get<double>(p); }
const std::string& name(const ParamValue& p) { return std::get<std::string>(p); }

bool same_param(const ParamValue& a, const ParamValue& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<double>(&a)) return *x == std::get<double>(b);
  return std::get<std::string>(a) == std::get<std::string>(b);
}

bool has_identity_activation(Activation a) {
  return a == Activation::kLinear || a == Activation::kNone;
}

}  // namespace

std::string_view to_string(PreOperator op) noexcept {
  for (const auto& [o, n] : kNames) {
    if (o == op) return n;
  }
  return "?";
}

PreOperator parse_pre_operator(std::string_view s) {
  for (const auto& [o, n] : kNames) {
    if (n == s) return o;
  }
  throw Error(ErrorCode::kSchema, "unknown pre-training operator '" + std::string(s) + "'");
}

std::vector<ParamValue> default_grid(PreOperator op) {
  switch (op) {
    case PreOperator::kTCL:
    case PreOperator::kTRD:
    case PreOperator::kTAN:
    case PreOperator::kTUD:
      return {0.1, 0.3, 0.5};
    case PreOperator::kHLR:
      return {0.01, 0.1, 10.0, 100.0};
    case PreOperator::kHNE:
      return {0.1, 0.5};
    case PreOperator::kHBS:
      return {0.5, 2.0};
    case PreOperator::kACH:
      return {std::string("relu"), std::string("sigmoid"), std::string("tanh")};
    case PreOperator::kARM:
      return {0.0};
    case PreOperator::kLCH:
      return {std::string("cross_entropy"), std::string("mse")};
    case PreOperator::kWCI:
      return {std::string("xavier_uniform"), std::string("he_uniform"), std::string("zeros")};
    case PreOperator::kOCH:
      return {std::string("sgd"), std::string("sgd_momentum"), std::string("adam")};
  }
  return {};
}

void validate_pre_param(PreOperator op, const ParamValue& param) {
  const std::string label = std::string(to_string(op)) + " parameter " + format_param(param);
  if (is_name_operator(op)) {
    if (!std::holds_alternative<std::string>(param)) {
      throw Error(ErrorCode::kInvalidArgument, label + " must be a name");
    }
    try {
      switch (op) {
        case PreOperator::kACH: parse_activation(name(param)); break;
        case PreOperator::kLCH: parse_loss(name(param)); break;
        case PreOperator::kWCI: parse_weight_init(name(param)); break;
        case PreOperator::kOCH: parse_optimizer(name(param)); break;
        default: break;
      }
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidArgument, label + ": " + e.what());
    }
    return;
  }
  if (!std::holds_alternative<double>(param)) {
    throw Error(ErrorCode::kInvalidArgument, label + " must be a number");
  }
  const double v = number(param);
  if (is_rate_operator(op) && !(v > 0.0 && v < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, label + " must lie in the open interval (0, 1)");
  }
  if (is_factor_operator(op) && !(v > 0.0 && std::isfinite(v))) {
    throw Error(ErrorCode::kInvalidArgument, label + " must be a positive factor");
  }
  if (op == PreOperator::kARM && !(v >= 0.0 && v == std::floor(v))) {
    throw Error(ErrorCode::kInvalidArgument, label + " must be a layer index");
  }
}

PreMutantCandidate apply_pre_operator(const PreOperatorConfig& config,
                                      const ParamValue& param,
                                      const TrainingJob& fixed,
                                      const std::string& bug_id,
                                      std::uint64_t seed) {
  const PreOperator op = config.op;
  if (std::none_of(config.grid.begin(), config.grid.end(),
                   [&](const ParamValue& g) { return same_param(g, param); })) {
    throw Error(ErrorCode::kInvalidArgument,
                format_param(param) + " is not in the " + std::string(to_string(op)) + " grid");
  }
  validate_pre_param(op, param);

  PreMutantCandidate out;
  out.descriptor.approach = Approach::kPreTraining;
  out.descriptor.scenario = Scenario::kPre;
  out.descriptor.op = std::string(to_string(op));
  out.descriptor.param = format_param(param);
  out.descriptor.bug_id = bug_id;
  out.descriptor.source_fingerprint = to_hex(fixed.content_hash());

  auto skip = [&](std::string reason) {
    out.skip_reason = std::move(reason);
    return out;
  };

  TrainingJob job = fixed;
  const Split& train = *fixed.data.train;
  RandomStream rng(seed);
  auto& layers = job.spec.architecture.layers;

  switch (op) {
    case PreOperator::kTCL: {
      std::size_t count = count_for_rate(number(param), train.size());
      if (count == 0) return skip("rate selects no training rows");
      job.data = fixed.data.with_train(flip_labels(train, count, fixed.data.class_count, rng));
      break;
    }
    case PreOperator::kTRD: {
      std::size_t count = count_for_rate(number(param), train.size());
      if (count == 0) return skip("rate selects no training rows");
      auto drop = rng.sample_without_replacement(train.size(), count);
      job.data = fixed.data.with_train(remove_rows(train, drop));
      break;
    }
    case PreOperator::kTAN: {
      std::size_t count = count_for_rate(number(param), train.size());
      if (count == 0) return skip("rate selects no training rows");
      job.data = fixed.data.with_train(add_feature_noise(train, count, kAdditiveNoiseStd, rng));
      break;
    }
    case PreOperator::kTUD: {
      auto counts = class_counts(train, fixed.data.class_count);
      auto majority = static_cast<std::size_t>(
          std::max_element(counts.begin(), counts.end()) - counts.begin());
      std::vector<std::size_t> drop;
      for (std::size_t c = 0; c < counts.size(); ++c) {
        if (c == majority) continue;
        std::vector<std::size_t> members;
        for (std::size_t r = 0; r < train.size(); ++r) {
          if (train.labels[r] == c) members.push_back(r);
        }
        std::size_t count = count_for_rate(number(param), members.size());
        for (std::size_t pick : rng.sample_without_replacement(members.size(), count)) {
          drop.push_back(members[pick]);
        }
      }
      if (drop.empty()) return skip("no minority-class rows to remove");
      job.data = fixed.data.with_train(remove_rows(train, drop));
      break;
    }
    case PreOperator::kHLR:
      if (number(param) == 1.0) return skip("factor 1 leaves the learning rate unchanged");
      job.spec.learning_rate = fixed.spec.learning_rate * number(param);
      break;
    case PreOperator::kHNE: {
      auto epochs = static_cast<std::size_t>(
          std::max(1.0, std::floor(double(fixed.spec.epochs) * number(param) + 0.5)));
      if (epochs == fixed.spec.epochs) return skip("epoch count unchanged");
      job.spec.epochs = epochs;
      break;
    }
    case PreOperator::kHBS: {
      double scaled = std::floor(double(fixed.spec.batch_size) * number(param) + 0.5);
      auto batch = static_cast<std::size_t>(std::clamp(scaled, 1.0, double(train.size())));
      if (batch == fixed.spec.batch_size) return skip("batch size unchanged");
      job.spec.batch_size = batch;
      break;
    }
    case PreOperator::kACH: {
      if (layers.size() < 2) return skip("network has no hidden layer");
      Activation a = parse_activation(name(param));
      if (layers[0].activation == a) return skip("first hidden layer already uses " + name(param));
      layers[0].activation = a;
      break;
    }
    case PreOperator::kARM: {
      auto index = static_cast<std::size_t>(number(param));
      if (index + 1 >= layers.size()) return skip("layer " + format_param(param) + " is not a hidden layer");
      if (has_identity_activation(layers[index].activation)) {
        return skip("layer " + format_param(param) + " has no activation to remove");
      }
      layers[index].activation = Activation::kLinear;
      break;
    }
    case PreOperator::kLCH: {
      Loss loss = parse_loss(name(param));
      if (loss == fixed.spec.loss) return skip("loss already " + name(param));
      if (loss == Loss::kCrossEntropy && layers.back().activation != Activation::kSoftmax) {
        return skip("cross_entropy needs a softmax head");
      }
      job.spec.loss = loss;
      break;
    }
    case PreOperator::kWCI: {
      WeightInit init = parse_weight_init(name(param));
      if (init == fixed.spec.weight_init) return skip("initializer already " + name(param));
      job.spec.weight_init = init;
      break;
    }
    case PreOperator::kOCH: {
      Optimizer opt = parse_optimizer(name(param));
      if (opt == fixed.spec.optimizer) return skip("optimizer already " + name(param));
      job.spec.optimizer = opt;
      break;
    }
  }
  if (job.spec.batch_size > job.data.train->size()) {
    return skip("batch size exceeds the reduced training set");
  }
  out.job = std::move(job);
  return out;
}

std::vector<PreMutantCandidate> enumerate_pre_mutants(
    const std::vector<PreOperatorConfig>& configs, const TrainingJob& fixed,
    const std::string& bug_id, std::uint64_t seed) {
  std::vector<PreMutantCandidate> out;
  for (const auto& config : configs) {
    for (const auto& param : config.grid) {
      std::string tag = "pre/" + std::string(to_string(config.op)) + "/" + format_param(param);
      out.push_back(apply_pre_operator(config, param, fixed, bug_id, derive_seed(seed, tag)));
    }
  }
  return out;
}

TrivialFilterResult filter_trivial_mutants(const std::vector<KPVector>& kp_vectors) {
  TrivialFilterResult r;
  for (std::size_t i = 0; i < kp_vectors.size(); ++i) {
    if (kp_vectors[i].all_zero()) {
      r.discarded.push_back(i);
      r.reasons.emplace_back(kNoBehavioralVariance);
    } else {
      r.kept.push_back(i);
    }
  }
  return r;
}

}  // namespace mutrealism
