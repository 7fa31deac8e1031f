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

#include "mutrealism/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "mutrealism/error.hpp"

namespace mutrealism {

double KPVector::total() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

bool KPVector::all_zero() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

KPVector killing_probability(const ExecutionMatrix& matrix) {
  const std::size_t n = matrix.n_effective();
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "killing probability needs at least one valid instance pair");
  }
  KPVector kp;
  kp.n_effective = n;
  kp.values.resize(matrix.tests);
  for (std::size_t t = 0; t < matrix.tests; ++t) {
    std::size_t kills = 0;
    for (std::size_t j = 0; j < n; ++j) kills += matrix.at(t, j);
    kp.values[t] = double(kills) / double(n);
  }
  return kp;
}

namespace {

void require_same_domain(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDomainMismatch,
                "KP vectors cover different test sets (" + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()) + " inputs)");
  }
}

}  // namespace

Score coupling_strength(std::span<const double> kp_mutant,
                        std::span<const double> kp_fault) {
  require_same_domain(kp_mutant, kp_fault);
  double shared = 0.0, mutant = 0.0;
  for (std::size_t t = 0; t < kp_mutant.size(); ++t) {
    shared += std::min(kp_mutant[t], kp_fault[t]);
    mutant += kp_mutant[t];
  }
  if (mutant == 0.0) return {};
  return {shared / mutant, true};
}

Score coupling_strength(const KPVector& kp_mutant, const KPVector& kp_fault) {
  return coupling_strength(kp_mutant.values, kp_fault.values);
}

Score behavioral_similarity(std::span<const double> kp_mutant,
                            std::span<const double> kp_fault) {
  require_same_domain(kp_mutant, kp_fault);
  double shared = 0.0, either = 0.0;
  for (std::size_t t = 0; t < kp_mutant.size(); ++t) {
    shared += std::min(kp_mutant[t], kp_fault[t]);
    either += std::max(kp_mutant[t], kp_fault[t]);
  }
  if (either == 0.0) return {};
  return {shared / either, true};
}

Score behavioral_similarity(const KPVector& kp_mutant, const KPVector& kp_fault) {
  return behavioral_similarity(kp_mutant.values, kp_fault.values);
}

double quantile_linear(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::kInvalidArgument, "quantile of empty sample");
  const double h = double(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - double(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> values) {
  BoxStats s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile_linear(values, 0.25);
  s.median = quantile_linear(values, 0.5);
  s.q3 = quantile_linear(values, 0.75);
  const double iqr = s.q3 - s.q1;
  const double low_fence = s.q1 - 1.5 * iqr;
  const double high_fence = s.q3 + 1.5 * iqr;
  s.whisker_low = s.q1;
  s.whisker_high = s.q3;
  for (double v : values) {
    if (v >= low_fence) {
      s.whisker_low = std::min(v, s.q1);
      break;
    }
  }
  for (auto it = values.rbegin(); it != values.rend(); ++it) {
    if (*it <= high_fence) {
      s.whisker_high = std::max(*it, s.q3);
      break;
    }
  }
  for (double v : values) {
    if (v < s.whisker_low || v > s.whisker_high) s.outliers.push_back(v);
  }
  return s;
}

std::string_view to_string(Metric m) noexcept {
  return m == Metric::kCouplingStrength ? "cs" : "iou";
}

std::optional<Scenario> pick_winner(
    const std::array<std::optional<double>, kScenarioCount>& medians,
    const TieRule& rule) {
  std::optional<double> best;
  for (const auto& m : medians) {
    if (m && (!best || *m > *best)) best = m;
  }
  if (!best) return std::nullopt;
  auto top = [&](Scenario s) {
    const auto& m = medians[index_of(s)];
    return m && *m == *best;
  };
  if (top(Scenario::kPre)) return Scenario::kPre;
  bool s1 = top(Scenario::kPostS1);
  bool s2 = top(Scenario::kPostS2);
  if (s1 && s2) return rule.post_tie_winner;
  return s1 ? Scenario::kPostS1 : Scenario::kPostS2;
}

BugSummary summarize_bug(const BugScores& scores, const TieRule& rule) {
  BugSummary out;
  out.bug_id = scores.bug_id;
  bool any = false;
  std::array<std::optional<double>, kScenarioCount> cs_medians, iou_medians;
  for (std::size_t g = 0; g < kScenarioCount; ++g) {
    out.cs[g] = box_stats(scores.cs[g]);
    out.iou[g] = box_stats(scores.iou[g]);
    if (out.cs[g].count) cs_medians[g] = out.cs[g].median;
    if (out.iou[g].count) iou_medians[g] = out.iou[g].median;
    any = any || out.cs[g].count || out.iou[g].count;
  }
  if (!any) {
    throw Error(ErrorCode::kInvalidArgument,
                "bug '" + scores.bug_id + "' has no scores in any scenario");
  }
  out.winner_cs = pick_winner(cs_medians, rule);
  out.winner_iou = pick_winner(iou_medians, rule);
  return out;
}

long rounded_percent(std::size_t count, std::size_t total) {
  if (total == 0) return 0;
  // floor(100 * count / total + 1/2) in exact integer arithmetic.
  return static_cast<long>((200 * count + total) / (2 * total));
}

DatasetAggregate aggregate_dataset(const std::vector<BugSummary>& bugs) {
  if (bugs.empty()) throw Error(ErrorCode::kInvalidArgument, "no bugs to aggregate");
  DatasetAggregate agg;
  agg.cs.bugs = agg.iou.bugs = bugs.size();
  for (const auto& b : bugs) {
    if (b.winner_cs) ++agg.cs.counts[index_of(*b.winner_cs)];
    if (b.winner_iou) ++agg.iou.counts[index_of(*b.winner_iou)];
  }
  for (std::size_t g = 0; g < kScenarioCount; ++g) {
    agg.cs.percent[g] = rounded_percent(agg.cs.counts[g], bugs.size());
    agg.iou.percent[g] = rounded_percent(agg.iou.counts[g], bugs.size());
  }
  return agg;
}

}  // namespace mutrealism
