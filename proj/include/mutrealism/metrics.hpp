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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mutrealism/execution_matrix.hpp"
#include "mutrealism/mutant.hpp"

namespace mutrealism {

/// Per-input killing probabilities; each value is k / n_effective.
struct KPVector {
  std::vector<double> values;
  std::size_t n_effective = 0;

  double total() const;
  bool all_zero() const;
};

/// KP(t) = (number of kept columns killing t) / n_effective.
/// Throws Error(kInvalidArgument) when no column was kept.
KPVector killing_probability(const ExecutionMatrix& matrix);

/// A ratio that may be undefined (zero denominator). Reports render an
/// undefined score as 0 with a marker.
struct Score {
  double value = 0.0;
  bool defined = false;

  double reported() const noexcept { return defined ? value : 0.0; }
};

/// CS = sum_t min(KP_M, KP_F) / sum_t KP_M; undefined when sum KP_M = 0.
/// Throws Error(kDomainMismatch) when the vectors differ in length.
Score coupling_strength(std::span<const double> kp_mutant,
                        std::span<const double> kp_fault);
Score coupling_strength(const KPVector& kp_mutant, const KPVector& kp_fault);

/// IoU = sum_t min / sum_t max; undefined when both vectors are all zero.
Score behavioral_similarity(std::span<const double> kp_mutant,
                            std::span<const double> kp_fault);
Score behavioral_similarity(const KPVector& kp_mutant, const KPVector& kp_fault);

/// Boxplot statistics. Quartiles use linear interpolation between order
/// statistics at position (N - 1) p; whiskers reach the most extreme data
/// within 1.5 IQR of the quartiles; outliers lie strictly beyond the whiskers.
struct BoxStats {
  std::size_t count = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;
};

/// `sorted` must be ascending and non-empty; p in [0, 1].
double quantile_linear(std::span<const double> sorted, double p);
BoxStats box_stats(std::vector<double> values);

inline constexpr std::size_t kScenarioCount = 3;
inline constexpr std::array<Scenario, kScenarioCount> kScenarios{
    Scenario::kPre, Scenario::kPostS1, Scenario::kPostS2};
constexpr std::size_t index_of(Scenario s) noexcept { return static_cast<std::size_t>(s); }

enum class Metric { kCouplingStrength, kBehavioralSimilarity };
std::string_view to_string(Metric m) noexcept;  // "cs" / "iou"

/// Scores of one bug grouped by scenario (reported values, undefined as 0).
struct BugScores {
  std::string bug_id;
  std::array<std::vector<double>, kScenarioCount> cs;
  std::array<std::vector<double>, kScenarioCount> iou;
};

/// Pre-training wins every tie it takes part in. Ties between the two
/// post-training scenarios alone go to `post_tie_winner`.
struct TieRule {
  Scenario post_tie_winner = Scenario::kPostS2;
};

struct BugSummary {
  std::string bug_id;
  std::array<BoxStats, kScenarioCount> cs;
  std::array<BoxStats, kScenarioCount> iou;
  std::optional<Scenario> winner_cs;
  std::optional<Scenario> winner_iou;
};

/// Winner among the non-empty groups by highest median.
std::optional<Scenario> pick_winner(
    const std::array<std::optional<double>, kScenarioCount>& medians,
    const TieRule& rule);

/// Throws Error(kInvalidArgument) when every group is empty.
BugSummary summarize_bug(const BugScores& scores, const TieRule& rule = {});

struct WinnerTable {
  std::size_t bugs = 0;
  std::array<std::size_t, kScenarioCount> counts{};
  /// Percentages rounded to the nearest integer, halves up.
  std::array<long, kScenarioCount> percent{};
};

struct DatasetAggregate {
  WinnerTable cs;
  WinnerTable iou;
};

/// Throws Error(kInvalidArgument) for an empty bug list.
DatasetAggregate aggregate_dataset(const std::vector<BugSummary>& bugs);

long rounded_percent(std::size_t count, std::size_t total);

}  // namespace mutrealism
