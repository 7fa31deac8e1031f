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

#include "mutrealism/dataset.hpp"
#include "mutrealism/nn.hpp"
#include "mutrealism/rng.hpp"

namespace mutrealism {

/// Everything needed to train one model configuration.
struct TrainingJob {
  Dataset data;
  TrainSpec spec;

  std::uint64_t content_hash() const;
};

/// Aspects in which two jobs differ, e.g. "train_labels", "learning_rate",
/// "activation[1]". "test_split" appears when the test splits differ in
/// content.
std::vector<std::string> diff_jobs(const TrainingJob& a, const TrainingJob& b);

// Edits of a training split. Each returns the edited copy and leaves the
// argument untouched.

/// Changes exactly `count` labels, each to a uniformly drawn different class.
Split flip_labels(const Split& split, std::size_t count,
                  std::size_t class_count, RandomStream& rng,
                  std::vector<std::size_t>* touched = nullptr);
Split remove_rows(const Split& split, const std::vector<std::size_t>& positions);
/// Adds N(0, stddev) to every feature of `count` randomly chosen rows.
Split add_feature_noise(const Split& split, std::size_t count, double stddev,
                        RandomStream& rng,
                        std::vector<std::size_t>* touched = nullptr);

/// round(rate * n), half away from zero.
std::size_t count_for_rate(double rate, std::size_t n);

enum class FaultOrigin { kDataFault, kProgramFault };
std::string_view to_string(FaultOrigin o) noexcept;

enum class ReferenceFaultKind {
  kLabelNoise,
  kFeatureNoise,
  kLrMisconfig,
  kWrongActivation,
  kMissingData,
};
std::string_view to_string(ReferenceFaultKind k) noexcept;
/// Throws Error(kSchema) for unknown kinds.
ReferenceFaultKind parse_reference_fault_kind(std::string_view s);

struct FaultParams {
  double rate = 0.0;        // label_noise, feature_noise, missing_data
  double factor = 1.0;      // lr_misconfig
  double noise_std = 0.5;   // feature_noise
  std::optional<Activation> activation;  // wrong_activation
};

struct BugFixPair {
  std::string bug_id;
  FaultOrigin origin = FaultOrigin::kDataFault;
  TrainingJob fixed;
  TrainingJob faulty;
  /// Human-readable audit record of the injected perturbation.
  std::string perturbation;
  /// Train-split positions touched by a data fault.
  std::vector<std::size_t> touched_rows;
};

/// Derives the faulty counterpart of `base`. The test split object is shared
/// between both variants.
BugFixPair make_reference_fault(std::string bug_id, ReferenceFaultKind kind,
                                const FaultParams& params,
                                const TrainingJob& base, std::uint64_t seed);

}  // namespace mutrealism
