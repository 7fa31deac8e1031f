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

#include "mutrealism/mutant.hpp"
#include "mutrealism/nn.hpp"

namespace mutrealism {

// Post-training operators acting on trained weights. "Neurons" are the units
// of every non-final layer; the output layer is never selected.
//
//   GF   w += N(0, sd of the layer's weights) on selected weights
//   BF   b += N(0, sd of the layer's biases) on selected biases
//   WS   shuffle the incoming weights of each selected neuron
//   NEB  zero the outgoing weights of each selected neuron
//   NAI  negate incoming weights and bias of each selected neuron
//   NS   selected neurons of a layer are paired and exchange incoming
//        weights and bias; a lone selection is paired with a random
//        unselected neuron of its layer
//   LD   one random square hidden layer becomes an identity pass-through;
//        ratio is ignored
enum class PostOperator { kGF, kWS, kNEB, kNAI, kNS, kLD, kBF };

std::string_view to_string(PostOperator op) noexcept;
PostOperator parse_post_operator(std::string_view s);
std::vector<PostOperator> all_post_operators();

struct PostMutationOperator {
  PostOperator op = PostOperator::kGF;
  double ratio = 0.01;
  std::uint64_t seed = 0;
};

/// 0 when ratio is 0, otherwise round-half-up(ratio * eligible) but at
/// least 1, capped at `eligible`.
std::size_t selection_count(double ratio, std::size_t eligible);

/// Number of elements the operator selects from: weights (GF), biases (BF),
/// hidden neurons (WS, NEB, NAI, NS) or square hidden layers (LD).
std::size_t eligible_count(PostOperator op, const Architecture& arch);

struct PostMutationResult {
  /// Empty when the operator is inapplicable.
  std::optional<ModelWeights> weights;
  MutantDescriptor descriptor;
  std::string skip_reason;
  /// Flat indices (in eligible_count order) of the selected elements.
  std::vector<std::size_t> selected;
};

/// Deterministic given (op, weights). Non-finite results are flagged invalid.
/// Throws Error(kInvalidArgument) for a ratio outside [0, 1].
PostMutationResult apply_post_operator(const PostMutationOperator& op,
                                       const ModelWeights& weights);

struct ScenarioPlan {
  Scenario scenario = Scenario::kPostS1;
  std::size_t repetitions = 5;      // scenario 1
  double default_ratio = 0.01;      // scenario 1
  std::vector<double> ratios;       // scenario 2
};

/// One post-training mutant: a fixed (operator, ratio) whose i-th instance
/// is derived from original instance i with instance_seeds[i].
struct PostMutantPlan {
  MutantDescriptor descriptor;
  PostOperator op = PostOperator::kGF;
  double ratio = 0.0;
  std::vector<std::uint64_t> instance_seeds;
};

/// Scenario 1 yields |operators| x repetitions mutants, scenario 2
/// |operators| x |ratios|; each carries n instances. Order: operator-major,
/// then repetition or ratio.
std::vector<PostMutantPlan> plan_mutants(const ScenarioPlan& plan,
                                         const std::vector<PostOperator>& operators,
                                         std::size_t n, std::uint64_t master_seed,
                                         const std::string& bug_id = {},
                                         const std::string& source_fingerprint = {});

}  // namespace mutrealism
