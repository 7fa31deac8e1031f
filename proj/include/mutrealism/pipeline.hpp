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
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mutrealism/engine.hpp"
#include "mutrealism/manifest.hpp"
#include "mutrealism/metrics.hpp"
#include "mutrealism/mutant.hpp"

namespace mutrealism {

/// Outcome of one enumerated mutant.
///   scored     CS defined
///   undefined  CS undefined (mutant KP all zero); reported as 0
///   discarded  removed by the trivial-mutant filter
///   skipped    operator inapplicable or mutant untrainable
enum class RowStatus { kScored, kUndefined, kDiscarded, kSkipped };
std::string_view to_string(RowStatus s) noexcept;
RowStatus parse_row_status(std::string_view s);

struct MutantRow {
  MutantDescriptor descriptor;
  RowStatus status = RowStatus::kScored;
  Score cs;
  Score iou;
  std::size_t n_effective = 0;
  std::vector<std::size_t> excluded;
  std::string oracle;
  /// "no behavioral variance" or a skip reason; empty otherwise.
  std::string marker;

  /// Contributes to the per-bug boxplots.
  bool counted() const noexcept {
    return status == RowStatus::kScored || status == RowStatus::kUndefined;
  }
};

struct BugRecord {
  std::string bug_id;
  std::string origin;
  std::string perturbation;
  std::size_t test_rows = 0;
  ScreeningVerdict screening;
  OracleDecision oracle;
  std::vector<std::size_t> invalid_original;
  std::vector<std::size_t> invalid_faulty;
  std::vector<std::size_t> fault_excluded;
  std::vector<double> fault_kp;
};

struct RealismReport {
  std::string tool_version;
  std::string manifest_name;
  std::string manifest_hash;
  std::uint64_t master_seed = 0;
  std::size_t n_instances = 0;
  TieRule tie_rule;
  std::vector<BugRecord> bugs;
  std::vector<MutantRow> rows;     // grouped by bug, in enumeration order
  std::vector<BugSummary> summaries;  // bugs with at least one counted row
  std::optional<DatasetAggregate> aggregate;

  std::vector<const MutantRow*> rows_of(std::string_view bug_id) const;
};

struct RunOptions {
  std::optional<std::size_t> jobs;
  std::optional<bool> cache_enabled;
  std::optional<std::filesystem::path> cache_dir;
  std::optional<bool> override_screening;
  std::optional<OracleMode> oracle_mode;
  /// Destination of line-delimited JSON events; null discards them.
  std::ostream* log = nullptr;
};

struct RunStats {
  std::size_t trainings = 0;
  std::size_t cache_hits = 0;
};

struct RunResult {
  RealismReport report;
  RunStats stats;
};

/// Loads every dataset and resolves every job without training. Throws
/// Error(kManifestInvalid).
void validate_experiment(const ExperimentManifest& manifest);

/// Per bug: train originals and faulty instances, screen, select the oracle,
/// train pre-training mutants, derive post-training mutants from the
/// originals, then score every mutant against the fault.
RunResult run_experiment(const ExperimentManifest& manifest, const RunOptions& options = {});

/// Scores grouped by scenario from the counted rows of one bug.
BugScores collect_scores(const RealismReport& report, std::string_view bug_id);

/// Recomputes summaries and the aggregate from the rows.
void summarize(RealismReport& report);

}  // namespace mutrealism
