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

// Acceptance suite. Prints one PASS/FAIL line per criterion; exit status is
// non-zero when any selected criterion fails. Usage: acceptance [N ...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mutrealism/engine.hpp"
#include "mutrealism/error.hpp"
#include "mutrealism/manifest.hpp"
#include "mutrealism/metrics.hpp"
#include "mutrealism/nn.hpp"
#include "mutrealism/pipeline.hpp"
#include "mutrealism/post_mutation.hpp"
#include "mutrealism/report.hpp"

namespace mr = mutrealism;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------------

Outcome metric_identities() {
  std::mt19937_64 rng(20261016);
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  auto random_kp = [&](std::size_t len) {
    const std::size_t n = uniform(1, 10);
    std::vector<double> kp(len);
    for (auto& v : kp) v = double(uniform(0, n)) / double(n);
    return kp;
  };
  const auto start = Clock::now();
  const std::size_t pairs = 20000;
  std::size_t violations = 0, defined = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::size_t len = uniform(1, 50);
    auto m = random_kp(len);
    auto f = random_kp(len);
    auto cs = mr::coupling_strength(m, f);
    auto iou = mr::behavioral_similarity(m, f);
    auto iou_rev = mr::behavioral_similarity(f, m);
    if (cs.defined) {
      ++defined;
      if (!(iou.defined && 0.0 <= iou.value && iou.value <= cs.value && cs.value <= 1.0)) {
        ++violations;
      }
    }
    if (iou.defined != iou_rev.defined || iou.value != iou_rev.value) ++violations;
    double mass = 0.0;
    for (double v : m) mass += v;
    if (mass > 0.0) {
      auto self_cs = mr::coupling_strength(m, m);
      auto self_iou = mr::behavioral_similarity(m, m);
      if (!(self_cs.defined && self_cs.value == 1.0 && self_iou.defined && self_iou.value == 1.0)) {
        ++violations;
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {violations == 0 && elapsed < 10.0,
          std::to_string(pairs) + " pairs (" + std::to_string(defined) + " with defined CS), " +
              std::to_string(violations) + " violations, " + fmt(elapsed) + " s"};
}

Outcome hand_oracle() {
  const std::vector<double> m{1.0, 0.4, 0.0}, f{0.6, 0.4, 0.2};
  auto cs = mr::coupling_strength(m, f);
  auto iou = mr::behavioral_similarity(m, f);
  const double cs_err = std::abs(cs.value - 1.0 / 1.4);
  const double iou_err = std::abs(iou.value - 1.0 / 1.6);
  return {cs.defined && iou.defined && cs_err <= 1e-12 && iou_err <= 1e-12,
          "CS=" + fmt(cs.value) + " IoU=" + fmt(iou.value)};
}

// Realizes a killing matrix through predictions: every label is 0, the
// originals always answer 0 and the target answers 1 where a cell is set.
mr::ExecutionMatrix realize(const std::vector<std::uint8_t>& cells, std::size_t tests,
                            std::size_t n, const mr::Dataset& data) {
  mr::InstanceSet originals, target;
  originals.n_declared = target.n_declared = n;
  for (std::size_t j = 0; j < n; ++j) {
    mr::Instance o, x;
    o.predictions.predicted.assign(tests, 0);
    x.predictions.predicted.assign(tests, 0);
    for (std::size_t t = 0; t < tests; ++t) x.predictions.predicted[t] = cells[t * n + j];
    originals.instances.push_back(std::move(o));
    target.instances.push_back(std::move(x));
  }
  return mr::build_execution_matrix(target, originals, data, mr::Oracle{});
}

Outcome brute_force() {
  std::mt19937_64 rng(7);
  const std::size_t budget = 100000;
  std::size_t cases = 0, mismatches = 0;

  auto naive_kp = [](const std::vector<std::uint8_t>& cells, std::size_t tests, std::size_t n) {
    std::vector<double> kp(tests);
    for (std::size_t t = 0; t < tests; ++t) {
      std::size_t kills = 0;
      for (std::size_t j = 0; j < n; ++j) kills += cells[t * n + j];
      kp[t] = double(kills) / double(n);
    }
    return kp;
  };
  auto check = [&](const std::vector<std::uint8_t>& mc, const std::vector<std::uint8_t>& fc,
                   std::size_t tests, std::size_t n, const mr::Dataset& data) {
    ++cases;
    auto kp_m = mr::killing_probability(realize(mc, tests, n, data));
    auto kp_f = mr::killing_probability(realize(fc, tests, n, data));
    auto ref_m = naive_kp(mc, tests, n);
    auto ref_f = naive_kp(fc, tests, n);
    double mins = 0.0, maxs = 0.0, mass = 0.0;
    for (std::size_t t = 0; t < tests; ++t) {
      mins += std::min(ref_m[t], ref_f[t]);
      maxs += std::max(ref_m[t], ref_f[t]);
      mass += ref_m[t];
    }
    auto cs = mr::coupling_strength(kp_m, kp_f);
    auto iou = mr::behavioral_similarity(kp_m, kp_f);
    bool ok = kp_m.values == ref_m && kp_f.values == ref_f;
    ok = ok && cs.defined == (mass > 0.0) && (!cs.defined || cs.value == mins / mass);
    ok = ok && iou.defined == (maxs > 0.0) && (!iou.defined || iou.value == mins / maxs);
    if (!ok) ++mismatches;
  };

  // Shapes ordered small to large; small shapes are enumerated exhaustively,
  // the remaining budget is spread over random samples of the larger ones.
  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  for (std::size_t tests = 1; tests <= 6; ++tests) {
    for (std::size_t n = 1; n <= 3; ++n) shapes.emplace_back(tests, n);
  }
  std::sort(shapes.begin(), shapes.end(),
            [](auto a, auto b) { return a.first * a.second < b.first * b.second; });
  std::size_t exhaustive_shapes = 0;
  for (std::size_t s = 0; s < shapes.size(); ++s) {
    const auto [tests, n] = shapes[s];
    mr::Dataset data;
    mr::Split split;
    split.features = mr::Matrix(tests, 1, 0.0);
    split.labels.assign(tests, 0);
    split.source_rows.resize(tests);
    data.class_count = 2;
    data.test = data.train = std::make_shared<const mr::Split>(split);

    const std::size_t bits = tests * n;
    const std::size_t total = std::size_t{1} << bits;
    const std::size_t shapes_left = shapes.size() - s;
    const std::size_t share = (budget - std::min(budget, cases)) / shapes_left;
    std::vector<std::uint8_t> mc(bits), fc(bits);
    auto fill = [&](std::vector<std::uint8_t>& c, std::uint64_t pattern) {
      for (std::size_t b = 0; b < bits; ++b) c[b] = (pattern >> b) & 1u;
    };
    if (total <= share) {
      ++exhaustive_shapes;
      for (std::uint64_t p = 0; p < total; ++p) {
        fill(mc, p);
        fill(fc, rng() & (total - 1));
        check(mc, fc, tests, n, data);
      }
    } else {
      for (std::size_t k = 0; k < share; ++k) {
        fill(mc, rng() & (total - 1));
        fill(fc, rng() & (total - 1));
        check(mc, fc, tests, n, data);
      }
    }
  }
  return {mismatches == 0 && cases >= budget * 99 / 100,
          std::to_string(cases) + " cases (" + std::to_string(exhaustive_shapes) +
              " shapes exhaustive), " + std::to_string(mismatches) + " mismatches"};
}

Outcome oracle_table() {
  mr::Dataset data;
  mr::Split split;
  split.features = mr::Matrix(4, 1, 0.0);
  split.labels = {1, 1, 1, 1};
  split.source_rows.resize(4);
  data.class_count = 2;
  data.test = data.train = std::make_shared<const mr::Split>(split);
  mr::InstanceSet originals, target;
  originals.n_declared = target.n_declared = 1;
  mr::Instance o, x;
  // (correct, wrong), (correct, correct), (wrong, wrong), (wrong, correct)
  o.predictions.predicted = {1, 1, 0, 0};
  x.predictions.predicted = {0, 1, 0, 1};
  originals.instances = {o};
  target.instances = {x};
  auto m = mr::build_execution_matrix(target, originals, data, mr::Oracle{});
  const std::vector<std::uint8_t> expected{1, 0, 0, 0};
  std::string got;
  for (auto c : m.cells) got += std::to_string(c);
  return {m.cells == expected, "KI=" + got};
}

mr::RunResult run_json(const mr::Json& j, const mr::RunOptions& options = {}) {
  auto m = mr::parse_manifest(j, ".");
  m.cache_enabled = false;
  return mr::run_experiment(m, options);
}

Outcome determinism() {
  auto m = mr::load_manifest(std::filesystem::path(MUTREALISM_SOURCE_DIR) / "manifests" / "desk.json");
  m.cache_enabled = false;
  const auto start = Clock::now();
  auto a = mr::run_experiment(m);
  auto b = mr::run_experiment(m);
  const double elapsed = seconds_since(start);
  const auto csv_a = mr::metrics_csv(a.report);
  const auto csv_b = mr::metrics_csv(b.report);
  return {csv_a == csv_b && elapsed < 300.0 && a.stats.cache_hits == 0 && b.stats.cache_hits == 0,
          std::to_string(a.report.rows.size()) + " rows, " + std::to_string(a.stats.trainings) +
              " trainings per run, " + (csv_a == csv_b ? "identical" : "DIFFERENT") + " CSVs, " +
              fmt(elapsed) + " s for both runs"};
}

Outcome gradient_check() {
  mr::BlobSpec bs;
  bs.classes = 3;
  bs.per_class = 10;
  bs.dim = 3;
  bs.separation = 2.0;
  bs.seed = 3;
  auto data = mr::gen_blobs(bs);
  const std::vector<mr::Activation> acts{mr::Activation::kRelu,   mr::Activation::kSigmoid,
                                         mr::Activation::kTanh,   mr::Activation::kLinear,
                                         mr::Activation::kNone,   mr::Activation::kSoftmax};
  double worst = 0.0;
  std::size_t combos = 0;
  for (auto hidden : acts) {
    for (auto head : acts) {
      for (auto loss : {mr::Loss::kCrossEntropy, mr::Loss::kMse}) {
        if (loss == mr::Loss::kCrossEntropy && head != mr::Activation::kSoftmax) continue;
        ++combos;
        for (std::uint64_t seed : {1u, 2u}) {
          mr::TrainSpec spec;
          spec.architecture = mr::Architecture::mlp(std::vector<std::size_t>{3, 5, 4, 3}, hidden, head);
          spec.loss = loss;
          spec.seed = seed;
          worst = std::max(worst, mr::grad_check(spec, data, 1e-5));
        }
      }
    }
  }
  return {worst < 1e-4, std::to_string(combos) + " activation/loss combinations, worst relative error " +
                            fmt(worst)};
}

mr::Json blobs(double separation, std::size_t per_class, std::uint64_t seed) {
  return {{"generator", "blobs"}, {"classes", 3},          {"per_class", per_class},
          {"dim", 4},             {"separation", separation}, {"seed", seed},
          {"test_fraction", 0.3}};
}

const std::vector<std::string> kAllPost{"GF", "WS", "NEB", "NAI", "NS", "LD", "BF"};

double median(std::vector<double> v) { return mr::box_stats(std::move(v)).median; }

Outcome self_realism() {
  std::vector<double> tcl;
  std::map<std::string, std::vector<double>> s1;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    mr::Json j{{"schema_version", 1},
               {"name", "self-realism"},
               {"master_seed", seed},
               {"n_instances", 5},
               {"defaults", {{"train_spec", {{"epochs", 30}, {"hidden_layers", {16, 16}}}}}},
               {"bugs", {{{"bug_id", "label-noise"},
                          {"dataset", blobs(2.5, 100, 1)},
                          {"fault", {{"kind", "label_noise"}, {"params", {{"rate", 0.3}}}}}}}},
               {"pre_operators", {{{"id", "TCL"}, {"grid", {0.3}}}}},
               {"post_operators", kAllPost},
               {"scenario1", {{"repetitions", 5}, {"default_ratio", 0.01}}}};
    auto r = run_json(j).report;
    for (const auto& row : r.rows) {
      if (!row.counted()) continue;
      if (row.descriptor.scenario == mr::Scenario::kPre) tcl.push_back(row.cs.reported());
      if (row.descriptor.scenario == mr::Scenario::kPostS1) {
        s1[row.descriptor.id()].push_back(row.cs.reported());
      }
    }
  }
  if (tcl.size() != 5) return {false, "TCL 0.3 was scored in " + std::to_string(tcl.size()) + "/5 runs"};
  const double tcl_median = median(tcl);
  double best_s1 = -1.0;
  std::string best_id;
  for (const auto& [id, values] : s1) {
    const double m = median(values);
    if (m > best_s1) best_s1 = m, best_id = id;
  }
  return {tcl_median >= 0.5 && tcl_median > best_s1 && s1.size() == 35,
          "TCL 0.3 median CS " + fmt(tcl_median) + " over 5 seeds; highest S1 median " +
              fmt(best_s1) + " (" + best_id + ") across " + std::to_string(s1.size()) +
              " S1 mutants"};
}

Outcome degenerate_regime() {
  mr::Json j{{"schema_version", 1},
             {"name", "saturated"},
             {"master_seed", 3},
             {"n_instances", 5},
             {"defaults", {{"train_spec", {{"epochs", 40}, {"hidden_layers", {16, 16}}}}}},
             {"bugs", {{{"bug_id", "separable"},
                        {"dataset", blobs(10.0, 60, 4)},
                        {"fault", {{"kind", "lr_misconfig"}, {"params", {{"factor", 0.3}}}}}}}},
             {"post_operators", kAllPost},
             {"scenario1", {{"repetitions", 5}}},
             {"scenario2", mr::Json::object()}};
  mr::RunOptions forced;
  forced.oracle_mode = mr::OracleMode::kAccuracy;
  auto acc = run_json(j, forced).report;
  const bool saturated = acc.bugs.at(0).screening.accuracy_saturated;
  std::size_t post = 0, zeroed = 0;
  for (const auto& row : acc.rows) {
    if (row.descriptor.approach != mr::Approach::kPostTraining || !row.counted()) continue;
    ++post;
    if (row.cs.reported() == 0.0 && row.iou.reported() == 0.0 &&
        row.marker == "no behavioral variance") {
      ++zeroed;
    }
  }
  auto fallback = run_json(j).report;
  const auto& decision = fallback.bugs.at(0).oracle;
  std::size_t defined = 0;
  for (const auto& row : fallback.rows) defined += row.cs.defined ? 1 : 0;
  const double variance = fallback.bugs.at(0).screening.loss_variance;
  return {saturated && post == 70 && zeroed == post &&
              decision.oracle.kind == mr::OracleKind::kLoss && variance > 0.0 && defined >= 1,
          std::string("saturated=") + (saturated ? "true" : "false") + "; accuracy oracle: " +
              std::to_string(zeroed) + "/" + std::to_string(post) +
              " post mutants at 0 with marker; fallback " + decision.oracle.describe() +
              " (loss variance " + fmt(variance) + "): " + std::to_string(defined) +
              " defined scores"};
}

Outcome scenario_bookkeeping() {
  std::vector<mr::PostOperator> ops;
  for (const auto& name : kAllPost) ops.push_back(mr::parse_post_operator(name));
  mr::ScenarioPlan p1;
  p1.scenario = mr::Scenario::kPostS1;
  mr::ScenarioPlan p2;
  p2.scenario = mr::Scenario::kPostS2;
  p2.ratios = {0.01, 0.1, 0.2, 0.6, 1.0};
  auto s1 = mr::plan_mutants(p1, ops, 5, 1);
  auto s2 = mr::plan_mutants(p2, ops, 5, 1);
  bool seeds_ok = true;
  for (const auto* plan : {&s1, &s2}) {
    for (const auto& m : *plan) seeds_ok = seeds_ok && m.instance_seeds.size() == 5;
  }

  mr::Json j{{"schema_version", 1},
             {"name", "bookkeeping"},
             {"master_seed", 9},
             {"n_instances", 5},
             {"defaults", {{"train_spec", {{"epochs", 10}, {"hidden_layers", {8, 8}}}}}},
             {"bugs", {{{"bug_id", "b"},
                        {"dataset", blobs(3.0, 30, 2)},
                        {"fault", {{"kind", "label_noise"}, {"params", {{"rate", 0.2}}}}}}}},
             {"post_operators", kAllPost},
             {"scenario1", {{"repetitions", 5}}},
             {"scenario2", mr::Json::object()}};
  auto r = run_json(j).report;
  std::size_t rows1 = 0, rows2 = 0, instances1 = 0, instances2 = 0;
  for (const auto& row : r.rows) {
    const std::size_t inst = row.status == mr::RowStatus::kSkipped ? 0 : row.n_effective + row.excluded.size();
    if (row.descriptor.scenario == mr::Scenario::kPostS1) ++rows1, instances1 += inst;
    if (row.descriptor.scenario == mr::Scenario::kPostS2) ++rows2, instances2 += inst;
  }
  return {s1.size() == 35 && s2.size() == 35 && seeds_ok && rows1 == 35 && rows2 == 35 &&
              instances1 == 175 && instances2 == 175,
          "plan S1=" + std::to_string(s1.size()) + " S2=" + std::to_string(s2.size()) +
              "; run S1 " + std::to_string(rows1) + " mutants/" + std::to_string(instances1) +
              " instances, S2 " + std::to_string(rows2) + " mutants/" +
              std::to_string(instances2) + " instances"};
}

Outcome winner_aggregation() {
  // 19 bugs with single-valued groups (median = value).
  struct Fixture {
    double pre, s1, s2;
    mr::Scenario expected;
  };
  std::vector<Fixture> fx;
  for (int i = 0; i < 11; ++i) fx.push_back({0.8, 0.3, 0.2, mr::Scenario::kPre});
  fx.push_back({0.5, 0.5, 0.1, mr::Scenario::kPre});   // tie with S1
  fx.push_back({0.5, 0.2, 0.5, mr::Scenario::kPre});   // tie with S2
  fx.push_back({0.4, 0.4, 0.4, mr::Scenario::kPre});   // three-way tie
  fx.push_back({0.0, 0.0, 0.0, mr::Scenario::kPre});   // all zero
  fx.push_back({0.1, 0.7, 0.3, mr::Scenario::kPostS1});
  fx.push_back({0.1, 0.3, 0.7, mr::Scenario::kPostS2});
  fx.push_back({0.1, 0.6, 0.6, mr::Scenario::kPostS2});  // post-only tie
  fx.push_back({0.2, 0.9, 0.1, mr::Scenario::kPostS1});

  std::vector<mr::BugSummary> summaries;
  std::size_t wrong = 0;
  for (std::size_t b = 0; b < fx.size(); ++b) {
    mr::BugScores s;
    s.bug_id = "bug" + std::to_string(b);
    s.cs = {std::vector<double>{fx[b].pre}, {fx[b].s1}, {fx[b].s2}};
    s.iou = s.cs;
    auto summary = mr::summarize_bug(s);
    if (summary.winner_cs != fx[b].expected || summary.winner_iou != fx[b].expected) ++wrong;
    summaries.push_back(summary);
  }
  auto agg = mr::aggregate_dataset(summaries);
  const auto& t = agg.cs;
  const bool counts = t.bugs == 19 && t.counts[0] == 15 && t.counts[1] == 2 && t.counts[2] == 2;
  const bool percent = t.percent[0] == 79 && t.percent[1] == 11 && t.percent[2] == 11;
  const bool iou_same = agg.iou.counts == t.counts && agg.iou.percent == t.percent;
  const bool half_up = mr::rounded_percent(1, 8) == 13 && mr::rounded_percent(1, 200) == 1;
  return {wrong == 0 && counts && percent && iou_same && half_up,
          "pre " + std::to_string(t.counts[0]) + "/" + std::to_string(t.bugs) + " = " +
              std::to_string(t.percent[0]) + "%, S1 " + std::to_string(t.percent[1]) + "%, S2 " +
              std::to_string(t.percent[2]) + "%, " + std::to_string(wrong) + " tie-rule errors"};
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"metric identities on random KP pairs", metric_identities},
      {"hand-computed CS and IoU", hand_oracle},
      {"brute-force KP/CS/IoU equivalence", brute_force},
      {"accuracy oracle table", oracle_table},
      {"determinism of the desk experiment", determinism},
      {"analytic gradients match finite differences", gradient_check},
      {"self-realism of label noise vs TCL", self_realism},
      {"saturated regime and loss fallback", degenerate_regime},
      {"post-training scenario bookkeeping", scenario_bookkeeping},
      {"winner aggregation and rounding", winner_aggregation},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    const long k = std::strtol(argv[i], nullptr, 10);
    if (k < 1 || k > static_cast<long>(criteria().size())) {
      std::cerr << "unknown criterion '" << argv[i] << "'\n";
      return 2;
    }
    selected.push_back(static_cast<std::size_t>(k));
  }
  if (selected.empty()) {
    for (std::size_t k = 1; k <= criteria().size(); ++k) selected.push_back(k);
  }
  int failures = 0;
  for (std::size_t k : selected) {
    const auto& c = criteria()[k - 1];
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << k << "] " << c.title << ": " << o.detail
              << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
