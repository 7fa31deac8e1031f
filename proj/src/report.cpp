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

#include "mutrealism/report.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "mutrealism/error.hpp"

namespace mutrealism {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string file_stem(const std::string& bug_id) {
  std::string out;
  for (char c : bug_id) {
    bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                c == '-' || c == '_' || c == '.';
    out += keep ? c : '_';
  }
  return out;
}

Json score_json(const Score& s) { return s.defined ? Json(s.value) : Json(nullptr); }

Score score_from(const Json& j) {
  Score s;
  if (!j.is_null()) {
    s.value = j.get<double>();
    s.defined = true;
  }
  return s;
}

Approach parse_approach(const std::string& s) {
  if (s == to_string(Approach::kPreTraining)) return Approach::kPreTraining;
  if (s == to_string(Approach::kPostTraining)) return Approach::kPostTraining;
  throw Error(ErrorCode::kSchema, "unknown approach '" + s + "'");
}

Json verdict_json(const ScreeningVerdict& v) {
  return Json{{"accuracy_saturated", v.accuracy_saturated},
              {"loss_variance", v.loss_variance},
              {"class_imbalance_ratio", v.class_imbalance_ratio},
              {"verdict", to_string(v.verdict)},
              {"notes", v.notes}};
}

ScreeningVerdict verdict_from(const Json& j) {
  ScreeningVerdict v;
  v.accuracy_saturated = j.at("accuracy_saturated").get<bool>();
  v.loss_variance = j.at("loss_variance").get<double>();
  v.class_imbalance_ratio = j.at("class_imbalance_ratio").get<double>();
  const auto name = j.at("verdict").get<std::string>();
  for (auto k : {Verdict::kOk, Verdict::kWarn, Verdict::kBlock}) {
    if (to_string(k) == name) v.verdict = k;
  }
  v.notes = j.at("notes").get<std::vector<std::string>>();
  return v;
}

Json winners_json(const WinnerTable& t) {
  Json out = Json::object();
  out["bugs"] = t.bugs;
  for (Scenario s : kScenarios) {
    out[std::string(to_string(s))] = {{"count", t.counts[index_of(s)]},
                                      {"percent", t.percent[index_of(s)]}};
  }
  return out;
}

Json winner_json(const std::optional<Scenario>& s) {
  return s ? Json(std::string(to_string(*s))) : Json(nullptr);
}

const BugSummary* find_summary(const RealismReport& r, const std::string& bug_id) {
  for (const auto& s : r.summaries) {
    if (s.bug_id == bug_id) return &s;
  }
  return nullptr;
}

Json boxplot_json(const RealismReport& r, const std::string& bug_id, Metric metric) {
  const BugSummary* summary = find_summary(r, bug_id);
  const BugScores scores = collect_scores(r, bug_id);
  Json groups = Json::array();
  for (Scenario s : kScenarios) {
    const std::size_t g = index_of(s);
    const auto& values = metric == Metric::kCouplingStrength ? scores.cs[g] : scores.iou[g];
    Json stats = nullptr;
    if (summary && !values.empty()) {
      stats = box_stats_to_json(metric == Metric::kCouplingStrength ? summary->cs[g]
                                                                    : summary->iou[g]);
    }
    groups.push_back({{"scenario", to_string(s)},
                      {"count", values.size()},
                      {"stats", stats},
                      {"values", values}});
  }
  std::optional<Scenario> winner;
  if (summary) winner = metric == Metric::kCouplingStrength ? summary->winner_cs : summary->winner_iou;
  return Json{{"bug_id", bug_id},
              {"metric", to_string(metric)},
              {"groups", groups},
              {"winner", winner_json(winner)}};
}

std::string winners_csv(const WinnerTable& t) {
  std::string out = "scenario,count,percent\n";
  for (Scenario s : kScenarios) {
    out += std::string(to_string(s)) + "," + std::to_string(t.counts[index_of(s)]) + "," +
           std::to_string(t.percent[index_of(s)]) + "\n";
  }
  return out;
}

}  // namespace

Json box_stats_to_json(const BoxStats& s) {
  return Json{{"count", s.count},         {"min", s.min},
              {"q1", s.q1},               {"median", s.median},
              {"q3", s.q3},               {"max", s.max},
              {"whisker_low", s.whisker_low}, {"whisker_high", s.whisker_high},
              {"outliers", s.outliers}};
}

std::string metrics_csv(const RealismReport& report) {
  std::string out = std::string(kMetricsCsvHeader) + "\n";
  for (const auto& row : report.rows) {
    const auto& d = row.descriptor;
    const bool skipped = row.status == RowStatus::kSkipped;
    const bool defined = !skipped && row.cs.defined && row.iou.defined;
    out += csv_field(d.bug_id) + "," + csv_field(d.id()) + "," +
           std::string(to_string(d.approach)) + "," + std::string(to_string(d.scenario)) + "," +
           csv_field(d.op) + "," + csv_field(d.param) + "," +
           (skipped ? "" : shortest(row.cs.reported())) + "," +
           (skipped ? "" : shortest(row.iou.reported())) + "," +
           std::to_string(row.n_effective) + "," + csv_field(row.oracle) + "," +
           (defined ? "1" : "0") + "," + std::string(to_string(row.status)) + "," +
           csv_field(row.marker) + "\n";
  }
  return out;
}

Json report_to_json(const RealismReport& r) {
  Json bugs = Json::array();
  for (const auto& b : r.bugs) {
    bugs.push_back({{"bug_id", b.bug_id},
                    {"origin", b.origin},
                    {"perturbation", b.perturbation},
                    {"test_rows", b.test_rows},
                    {"screening", verdict_json(b.screening)},
                    {"oracle", {{"kind", to_string(b.oracle.oracle.kind)},
                                {"epsilon", b.oracle.oracle.epsilon},
                                {"description", b.oracle.oracle.describe()},
                                {"reason", b.oracle.reason}}},
                    {"excluded_instances", {{"original", b.invalid_original},
                                            {"faulty", b.invalid_faulty},
                                            {"fault_matrix", b.fault_excluded}}},
                    {"fault_kp", b.fault_kp}});
  }
  Json rows = Json::array();
  Json skipped = Json::array();
  for (const auto& row : r.rows) {
    const auto& d = row.descriptor;
    rows.push_back({{"bug_id", d.bug_id},
                    {"mutant_id", d.id()},
                    {"approach", to_string(d.approach)},
                    {"scenario", to_string(d.scenario)},
                    {"operator", d.op},
                    {"param", d.param},
                    {"repetition", d.repetition},
                    {"source_fingerprint", d.source_fingerprint},
                    {"status", to_string(row.status)},
                    {"cs", score_json(row.cs)},
                    {"iou", score_json(row.iou)},
                    {"n_effective", row.n_effective},
                    {"excluded_instances", row.excluded},
                    {"oracle", row.oracle},
                    {"marker", row.marker}});
    if (row.status == RowStatus::kSkipped) {
      skipped.push_back({{"bug_id", d.bug_id}, {"mutant_id", d.id()}, {"reason", row.marker}});
    }
  }
  Json summaries = Json::array();
  for (const auto& s : r.summaries) {
    Json groups = Json::object();
    for (Scenario sc : kScenarios) {
      const std::size_t g = index_of(sc);
      groups[std::string(to_string(sc))] = {
          {"cs", s.cs[g].count ? box_stats_to_json(s.cs[g]) : Json(nullptr)},
          {"iou", s.iou[g].count ? box_stats_to_json(s.iou[g]) : Json(nullptr)}};
    }
    summaries.push_back({{"bug_id", s.bug_id},
                         {"groups", groups},
                         {"winner_cs", winner_json(s.winner_cs)},
                         {"winner_iou", winner_json(s.winner_iou)}});
  }
  Json aggregate = nullptr;
  if (r.aggregate) {
    aggregate = {{"cs", winners_json(r.aggregate->cs)}, {"iou", winners_json(r.aggregate->iou)}};
  }
  return Json{{"provenance",
               {{"tool", "mutrealism"},
                {"tool_version", r.tool_version},
                {"manifest_name", r.manifest_name},
                {"manifest_hash", r.manifest_hash},
                {"master_seed", r.master_seed},
                {"n_instances", r.n_instances},
                {"post_tie_winner", to_string(r.tie_rule.post_tie_winner)},
                {"bugs", bugs},
                {"skipped_mutants", skipped}}},
              {"rows", rows},
              {"summaries", summaries},
              {"aggregate", aggregate}};
}

RealismReport report_from_json(const Json& j) {
  try {
    RealismReport r;
    const Json& p = j.at("provenance");
    r.tool_version = p.at("tool_version").get<std::string>();
    r.manifest_name = p.at("manifest_name").get<std::string>();
    r.manifest_hash = p.at("manifest_hash").get<std::string>();
    r.master_seed = p.at("master_seed").get<std::uint64_t>();
    r.n_instances = p.at("n_instances").get<std::size_t>();
    r.tie_rule.post_tie_winner = parse_scenario(p.at("post_tie_winner").get<std::string>());
    for (const auto& b : p.at("bugs")) {
      BugRecord rec;
      rec.bug_id = b.at("bug_id").get<std::string>();
      rec.origin = b.at("origin").get<std::string>();
      rec.perturbation = b.at("perturbation").get<std::string>();
      rec.test_rows = b.at("test_rows").get<std::size_t>();
      rec.screening = verdict_from(b.at("screening"));
      const Json& o = b.at("oracle");
      rec.oracle.oracle.kind = parse_oracle_kind(o.at("kind").get<std::string>());
      rec.oracle.oracle.epsilon = o.at("epsilon").get<double>();
      rec.oracle.reason = o.at("reason").get<std::string>();
      const Json& ex = b.at("excluded_instances");
      rec.invalid_original = ex.at("original").get<std::vector<std::size_t>>();
      rec.invalid_faulty = ex.at("faulty").get<std::vector<std::size_t>>();
      rec.fault_excluded = ex.at("fault_matrix").get<std::vector<std::size_t>>();
      rec.fault_kp = b.at("fault_kp").get<std::vector<double>>();
      r.bugs.push_back(std::move(rec));
    }
    for (const auto& jr : j.at("rows")) {
      MutantRow row;
      auto& d = row.descriptor;
      d.bug_id = jr.at("bug_id").get<std::string>();
      d.approach = parse_approach(jr.at("approach").get<std::string>());
      d.scenario = parse_scenario(jr.at("scenario").get<std::string>());
      d.op = jr.at("operator").get<std::string>();
      d.param = jr.at("param").get<std::string>();
      d.repetition = jr.at("repetition").get<std::size_t>();
      d.source_fingerprint = jr.at("source_fingerprint").get<std::string>();
      row.status = parse_row_status(jr.at("status").get<std::string>());
      row.cs = score_from(jr.at("cs"));
      row.iou = score_from(jr.at("iou"));
      row.n_effective = jr.at("n_effective").get<std::size_t>();
      row.excluded = jr.at("excluded_instances").get<std::vector<std::size_t>>();
      row.oracle = jr.at("oracle").get<std::string>();
      row.marker = jr.at("marker").get<std::string>();
      r.rows.push_back(std::move(row));
    }
    summarize(r);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("malformed report: ") + e.what());
  }
}

RealismReport load_report(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, "report is not valid JSON: " + std::string(e.what()));
  }
  return report_from_json(j);
}

std::vector<std::filesystem::path> write_report(const RealismReport& report,
                                                const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto csv = dir / "metrics.csv";
  const auto json = dir / "report.json";
  write_file_atomic(csv, metrics_csv(report));
  write_file_atomic(json, report_to_json(report).dump(2) + "\n");
  return {csv, json};
}

std::vector<std::filesystem::path> emit_plots_data(const RealismReport& report,
                                                   const std::filesystem::path& dir) {
  const auto plots = dir / "plots";
  std::filesystem::create_directories(plots);
  std::vector<std::filesystem::path> out;
  for (const auto& bug : report.bugs) {
    for (Metric m : {Metric::kCouplingStrength, Metric::kBehavioralSimilarity}) {
      auto path = plots / (file_stem(bug.bug_id) + "_" + std::string(to_string(m)) + ".json");
      write_file_atomic(path, boxplot_json(report, bug.bug_id, m).dump(2) + "\n");
      out.push_back(path);
    }
  }
  const DatasetAggregate agg = report.aggregate.value_or(DatasetAggregate{});
  for (Metric m : {Metric::kCouplingStrength, Metric::kBehavioralSimilarity}) {
    auto path = plots / ("winners_" + std::string(to_string(m)) + ".csv");
    write_file_atomic(path, winners_csv(m == Metric::kCouplingStrength ? agg.cs : agg.iou));
    out.push_back(path);
  }
  return out;
}

std::string summary_text(const RealismReport& r) {
  std::ostringstream out;
  out << "manifest " << r.manifest_name << " (" << r.manifest_hash << "), n=" << r.n_instances
      << ", seed " << r.master_seed << "\n";
  char line[160];
  for (const auto& b : r.bugs) {
    std::size_t counts[4] = {0, 0, 0, 0};
    for (const MutantRow* row : r.rows_of(b.bug_id)) ++counts[static_cast<int>(row->status)];
    out << "\nbug " << b.bug_id << ": " << b.perturbation << "\n"
        << "  screening " << to_string(b.screening.verdict) << ", oracle "
        << b.oracle.oracle.describe() << " (" << b.oracle.reason << ")\n"
        << "  mutants: " << counts[0] << " scored, " << counts[1] << " undefined, " << counts[2]
        << " discarded, " << counts[3] << " skipped\n";
    const BugSummary* s = find_summary(r, b.bug_id);
    if (!s) continue;
    out << "  scenario   count  median_cs  median_iou\n";
    for (Scenario sc : kScenarios) {
      const std::size_t g = index_of(sc);
      if (s->cs[g].count == 0) {
        std::snprintf(line, sizeof line, "  %-9s %6d  %9s  %10s\n",
                      std::string(to_string(sc)).c_str(), 0, "-", "-");
      } else {
        std::snprintf(line, sizeof line, "  %-9s %6zu  %9.4f  %10.4f\n",
                      std::string(to_string(sc)).c_str(), s->cs[g].count, s->cs[g].median,
                      s->iou[g].median);
      }
      out << line;
    }
    out << "  winner cs " << (s->winner_cs ? to_string(*s->winner_cs) : "-") << ", iou "
        << (s->winner_iou ? to_string(*s->winner_iou) : "-") << "\n";
  }
  if (r.aggregate) {
    out << "\nwinners over " << r.aggregate->cs.bugs << " bug(s)\n";
    for (Scenario sc : kScenarios) {
      const std::size_t g = index_of(sc);
      std::snprintf(line, sizeof line, "  %-9s cs %3zu (%3ld%%)  iou %3zu (%3ld%%)\n",
                    std::string(to_string(sc)).c_str(), r.aggregate->cs.counts[g],
                    r.aggregate->cs.percent[g], r.aggregate->iou.counts[g],
                    r.aggregate->iou.percent[g]);
      out << line;
    }
  }
  return out.str();
}

}  // namespace mutrealism
