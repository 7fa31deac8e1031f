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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mutrealism/job.hpp"
#include "mutrealism/metrics.hpp"
#include "mutrealism/mutant.hpp"

namespace mutrealism {

// Pre-training operators. Data operators edit the training split only; the
// others edit one field of the TrainSpec.
//
//   TCL rate      change labels of round(rate * |train|) rows
//   TRD rate      remove round(rate * |train|) rows
//   TAN rate      add N(0, 0.5) noise to round(rate * |train|) rows
//   TUD rate      remove round(rate * count) rows of every non-majority class
//   HLR factor    learning_rate *= factor
//   HNE factor    epochs = max(1, round(epochs * factor))
//   HBS factor    batch_size = clamp(round(batch_size * factor), 1, |train|)
//   ACH name      activation of the first hidden layer
//   ARM index     activation of hidden layer `index` becomes linear
//   LCH name      loss function
//   WCI name      weight initializer
//   OCH name      optimizer
enum class PreOperator { kTCL, kTRD, kTAN, kTUD, kHLR, kHNE, kHBS, kACH, kARM, kLCH, kWCI, kOCH };

inline constexpr double kAdditiveNoiseStd = 0.5;

std::string_view to_string(PreOperator op) noexcept;
PreOperator parse_pre_operator(std::string_view s);
std::vector<ParamValue> default_grid(PreOperator op);

struct PreOperatorConfig {
  PreOperator op;
  std::vector<ParamValue> grid;
};

/// Throws Error(kInvalidArgument) if the value is outside the operator's
/// domain (for instance a removal rate of 1.0).
void validate_pre_param(PreOperator op, const ParamValue& param);

struct PreMutantCandidate {
  MutantDescriptor descriptor;
  /// Empty when the operator is inapplicable to the job.
  std::optional<TrainingJob> job;
  std::string skip_reason;

  bool applicable() const noexcept { return job.has_value(); }
};

/// Applies one operator. The parameter must belong to `config.grid` and the
/// operator's domain; inapplicability is reported through `skip_reason`.
PreMutantCandidate apply_pre_operator(const PreOperatorConfig& config,
                                      const ParamValue& param,
                                      const TrainingJob& fixed,
                                      const std::string& bug_id,
                                      std::uint64_t seed);

/// Cross product of operators and their grids, in configuration order. Each
/// candidate draws from derive_seed(seed, "pre/<OP>/<param>").
std::vector<PreMutantCandidate> enumerate_pre_mutants(
    const std::vector<PreOperatorConfig>& configs, const TrainingJob& fixed,
    const std::string& bug_id, std::uint64_t seed);

struct TrivialFilterResult {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> discarded;
  std::vector<std::string> reasons;  // parallel to `discarded`
};

inline constexpr std::string_view kNoBehavioralVariance = "no behavioral variance";

/// A mutant is discarded iff its KP vector is all zero.
TrivialFilterResult filter_trivial_mutants(const std::vector<KPVector>& kp_vectors);

}  // namespace mutrealism
