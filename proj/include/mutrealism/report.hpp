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

#include <filesystem>
#include <string>
#include <vector>

#include "mutrealism/pipeline.hpp"
#include "mutrealism/serialize.hpp"

namespace mutrealism {

inline constexpr const char* kMetricsCsvHeader =
    "bug_id,mutant_id,approach,scenario,operator,param,cs,iou,n_effective,oracle,"
    "defined_flag,status,marker";

/// One row per enumerated mutant. Skipped rows leave cs, iou and oracle
/// empty; undefined scores are written as 0 with defined_flag 0.
std::string metrics_csv(const RealismReport& report);

Json report_to_json(const RealismReport& report);
/// Summaries and the aggregate are recomputed from the rows.
RealismReport report_from_json(const Json& j);
RealismReport load_report(const std::filesystem::path& path);

Json box_stats_to_json(const BoxStats& s);

/// Writes metrics.csv and report.json under `dir`; returns the paths.
std::vector<std::filesystem::path> write_report(const RealismReport& report,
                                                const std::filesystem::path& dir);

/// plots/<bug>_cs.json and plots/<bug>_iou.json for every bug plus
/// plots/winners_cs.csv and plots/winners_iou.csv.
std::vector<std::filesystem::path> emit_plots_data(const RealismReport& report,
                                                   const std::filesystem::path& dir);

/// Plain-text digest: screening, oracle and medians per bug, winner table.
std::string summary_text(const RealismReport& report);

}  // namespace mutrealism
