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

#include "mutrealism/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <memory>

#include "mutrealism/error.hpp"
#include "mutrealism/post_mutation.hpp"
#include "mutrealism/pre_mutation.hpp"
#include "mutrealism/rng.hpp"

#ifndef MUTREALISM_VERSION
#define MUTREALISM_VERSION "0.0.0"
#endif

namespace mutrealism {

std::string_view to_string(RowStatus s) noexcept {
  switch (s) {
    case RowStatus::kScored: return "scored";
    case RowStatus::kUndefined: return "undefined";
    case RowStatus::kDiscarded: return "discarded";
    case RowStatus::kSkipped: return "skipped";
  }
  return "scored";
}

RowStatus parse_row_status(std::string_view s) {
  for (auto st : {RowStatus::kScored, RowStatus::kUndefined, RowStatus::kDiscarded,
                  RowStatus::kSkipped}) {
    if (to_string(st) == s) return st;
  }
  throw Error(ErrorCode::kSchema, "unknown row status '" + std::string(s) + "'");
}

std::vector<const MutantRow*> RealismReport::rows_of(std::string_view bug_id) const {
  std::vector<const MutantRow*> out;
  for (const auto& r : rows) {
    if (r.descriptor.bug_id == bug_id) out.push_back(&r);
  }
  return out;
}

namespace {

struct Runtime {
  Scheduler scheduler;
  std::unique_ptr<InstanceCache> cache;
  EventLog log;
  std::atomic<std::size_t> trainings{0};
  std::atomic<std::size_t> cache_hits{0};

  Runtime(std::size_t workers, std::ostream* sink) : scheduler(workers), log(sink) {}

  EngineContext context() {
    return {&scheduler, cache.get(), &log, &trainings, &cache_hits};
  }
};

MutantRow skipped_row(const MutantDescriptor& d, std::string reason) {
  MutantRow row;
  row.descriptor = d;
  row.status = RowStatus::kSkipped;
  row.marker = std::move(reason);
  return row;
}

/// Scores one mutant instance set against the fault's KP vector.
MutantRow score_mutant(const MutantDescriptor& d, const InstanceSet& mutant,
                       const InstanceSet& originals, const Dataset& data,
                       const Oracle& oracle, const KPVector& fault_kp,
                       KPVector* kp_out = nullptr) {
  ExecutionMatrix matrix;
  try {
    matrix = build_execution_matrix(mutant, originals, data, oracle);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoObservableBehavior) throw;
    return skipped_row(d, "no valid instance pair");
  }
  KPVector kp = killing_probability(matrix);
  MutantRow row;
  row.descriptor = d;
  row.cs = coupling_strength(kp, fault_kp);
  row.iou = behavioral_similarity(kp, fault_kp);
  row.n_effective = matrix.n_effective();
  row.excluded = matrix.excluded;
  row.oracle = oracle.describe();
  row.status = row.cs.defined ? RowStatus::kScored : RowStatus::kUndefined;
  if (kp.all_zero() || fault_kp.all_zero()) row.marker = std::string(kNoBehavioralVariance);
  if (kp_out) *kp_out = std::move(kp);
  return row;
}

std::vector<MutantRow> run_pre_mutants(const ExperimentManifest& m, const BugFixPair& bug,
                                       const InstanceSet& originals, const Oracle& oracle,
                                       const KPVector& fault_kp, Loss eval_loss,
                                       Runtime& rt) {
  const std::size_t n = m.n_instances;
  auto candidates = enumerate_pre_mutants(m.pre_operators, bug.fixed, bug.bug_id,
                                          derive_seed(m.master_seed, "pre/" + bug.bug_id));
  std::vector<InstanceJob> jobs;
  for (const auto& c : candidates) {
    if (!c.applicable()) continue;
    for (std::size_t i = 0; i < n; ++i) jobs.push_back({&*c.job, instance_seed(m.master_seed, i)});
  }
  rt.log.emit("pre_training", {{"bug_id", bug.bug_id},
                               {"mutants", candidates.size()},
                               {"trainings", jobs.size()}});
  auto trained = train_instances(jobs, eval_loss, rt.context());

  std::vector<MutantRow> rows(candidates.size());
  std::vector<std::size_t> scored;  // candidate indices with a KP vector
  std::vector<KPVector> kps;
  std::size_t next = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto& cand = candidates[c];
    if (!cand.applicable()) {
      rows[c] = skipped_row(cand.descriptor, cand.skip_reason);
      continue;
    }
    InstanceSet set;
    set.role = Role::kMutant;
    set.label = cand.descriptor.id();
    set.n_declared = n;
    set.instances.assign(std::make_move_iterator(trained.begin() + next),
                         std::make_move_iterator(trained.begin() + next + n));
    next += n;
    if (set.valid_count() == 0) {
      rows[c] = skipped_row(cand.descriptor, "untrainable: all instances invalid");
      continue;
    }
    KPVector kp;
    rows[c] = score_mutant(cand.descriptor, set, originals, bug.fixed.data, oracle, fault_kp, &kp);
    if (rows[c].status != RowStatus::kSkipped) {
      scored.push_back(c);
      kps.push_back(std::move(kp));
    }
  }
  if (m.filter_trivial_pre) {
    auto filtered = filter_trivial_mutants(kps);
    for (std::size_t k = 0; k < filtered.discarded.size(); ++k) {
      MutantRow& row = rows[scored[filtered.discarded[k]]];
      row.status = RowStatus::kDiscarded;
      row.marker = filtered.reasons[k];
    }
  }
  return rows;
}

std::vector<MutantRow> run_post_mutants(const ExperimentManifest& m, const BugFixPair& bug,
                                        const InstanceSet& originals, const Oracle& oracle,
                                        const KPVector& fault_kp, Loss eval_loss,
                                        Runtime& rt) {
  const std::size_t n = m.n_instances;
  const std::uint64_t seed = derive_seed(m.master_seed, "post/" + bug.bug_id);
  const std::string fingerprint = bug.fixed.spec.architecture.fingerprint();
  std::vector<PostMutantPlan> plans;
  for (const auto* scenario : {&m.scenario1, &m.scenario2}) {
    if (!*scenario) continue;
    auto p = plan_mutants(**scenario, m.post_operators, n, seed, bug.bug_id, fingerprint);
    plans.insert(plans.end(), p.begin(), p.end());
  }
  rt.log.emit("post_training", {{"bug_id", bug.bug_id}, {"mutants", plans.size()}});

  std::vector<Instance> instances(plans.size() * n);
  std::vector<std::string> skips(plans.size() * n);
  rt.scheduler.parallel_for(plans.size() * n, [&](std::size_t k) {
    const PostMutantPlan& plan = plans[k / n];
    const std::size_t i = k % n;
    const Instance& source = originals.instances[i];
    const std::uint64_t s = plan.instance_seeds[i];
    if (!source.weights.valid) {
      instances[k].weights = source.weights;
      instances[k].seed = s;
      return;
    }
    auto result = apply_post_operator({plan.op, plan.ratio, s}, source.weights);
    if (!result.weights) {
      skips[k] = result.skip_reason;
      return;
    }
    instances[k] = evaluate_instance(std::move(*result.weights), bug.fixed.data, eval_loss, s);
  });

  std::vector<MutantRow> rows;
  rows.reserve(plans.size());
  for (std::size_t p = 0; p < plans.size(); ++p) {
    std::string skip;
    for (std::size_t i = 0; i < n && skip.empty(); ++i) skip = skips[p * n + i];
    if (!skip.empty()) {
      rows.push_back(skipped_row(plans[p].descriptor, skip));
      continue;
    }
    InstanceSet set;
    set.role = Role::kMutant;
    set.label = plans[p].descriptor.id();
    set.n_declared = n;
    set.instances.assign(std::make_move_iterator(instances.begin() + p * n),
                         std::make_move_iterator(instances.begin() + (p + 1) * n));
    rows.push_back(score_mutant(plans[p].descriptor, set, originals, bug.fixed.data, oracle,
                                fault_kp));
  }
  return rows;
}

}  // namespace

void validate_experiment(const ExperimentManifest& manifest) {
  for (const auto& bug : manifest.bugs) (void)build_bug(bug, manifest);
}

BugScores collect_scores(const RealismReport& report, std::string_view bug_id) {
  BugScores scores;
  scores.bug_id = std::string(bug_id);
  for (const MutantRow* row : report.rows_of(bug_id)) {
    if (!row->counted()) continue;
    const std::size_t g = index_of(row->descriptor.scenario);
    scores.cs[g].push_back(row->cs.reported());
    scores.iou[g].push_back(row->iou.reported());
  }
  return scores;
}

void summarize(RealismReport& report) {
  report.summaries.clear();
  report.aggregate.reset();
  for (const auto& bug : report.bugs) {
    BugScores scores = collect_scores(report, bug.bug_id);
    bool any = std::any_of(scores.cs.begin(), scores.cs.end(),
                           [](const auto& g) { return !g.empty(); });
    if (any) report.summaries.push_back(summarize_bug(scores, report.tie_rule));
  }
  if (!report.summaries.empty()) report.aggregate = aggregate_dataset(report.summaries);
}

RunResult run_experiment(const ExperimentManifest& m, const RunOptions& options) {
  Runtime rt(options.jobs.value_or(m.jobs), options.log);
  if (options.cache_enabled.value_or(m.cache_enabled)) {
    rt.cache = std::make_unique<InstanceCache>(options.cache_dir.value_or(m.cache_dir));
  }
  OracleConfig oracle_config = m.oracle;
  if (options.override_screening) oracle_config.override_screening = *options.override_screening;
  if (options.oracle_mode) oracle_config.mode = *options.oracle_mode;

  // Every dataset is loaded before any training so that a broken manifest
  // fails fast.
  std::vector<BugFixPair> bugs;
  for (const auto& source : m.bugs) bugs.push_back(build_bug(source, m));

  RealismReport report;
  report.tool_version = MUTREALISM_VERSION;
  report.manifest_name = m.name;
  report.manifest_hash = m.hash;
  report.master_seed = m.master_seed;
  report.n_instances = m.n_instances;
  report.tie_rule = m.tie_rule;
  rt.log.emit("run_start", {{"manifest", m.name},
                            {"manifest_hash", m.hash},
                            {"bugs", bugs.size()},
                            {"workers", rt.scheduler.workers()},
                            {"cache", rt.cache ? rt.cache->dir().string() : std::string()}});

  for (const BugFixPair& bug : bugs) {
    const Loss eval_loss = bug.fixed.spec.loss;
    EngineContext ctx = rt.context();
    rt.log.emit("bug_start", {{"bug_id", bug.bug_id}, {"perturbation", bug.perturbation}});
    InstanceSet originals = train_instance_set(bug.fixed, Role::kOriginal, m.n_instances,
                                               m.master_seed, ctx, bug.bug_id + "/original",
                                               eval_loss);
    InstanceSet faulty = train_instance_set(bug.faulty, Role::kFaulty, m.n_instances,
                                            m.master_seed, ctx, bug.bug_id + "/faulty",
                                            eval_loss);
    BugRecord record;
    record.bug_id = bug.bug_id;
    record.origin = std::string(to_string(bug.origin));
    record.perturbation = bug.perturbation;
    record.test_rows = bug.fixed.data.test->size();
    record.screening = screen_subject(originals, faulty, bug.fixed.data);
    record.invalid_original = originals.invalid_indices();
    record.invalid_faulty = faulty.invalid_indices();
    rt.log.emit("screening", {{"bug_id", bug.bug_id},
                              {"verdict", to_string(record.screening.verdict)},
                              {"accuracy_saturated", record.screening.accuracy_saturated},
                              {"loss_variance", record.screening.loss_variance},
                              {"class_imbalance_ratio", record.screening.class_imbalance_ratio}});
    try {
      record.oracle = select_oracle(record.screening, oracle_config);
    } catch (const Error& e) {
      throw Error(e.code(), "bug '" + bug.bug_id + "': " + e.what());
    }
    rt.log.emit("oracle", {{"bug_id", bug.bug_id},
                           {"oracle", record.oracle.oracle.describe()},
                           {"reason", record.oracle.reason}});

    ExecutionMatrix fault_matrix =
        build_execution_matrix(faulty, originals, bug.fixed.data, record.oracle.oracle);
    KPVector fault_kp = killing_probability(fault_matrix);
    record.fault_excluded = fault_matrix.excluded;
    record.fault_kp = fault_kp.values;
    if (fault_kp.all_zero()) {
      rt.log.emit("warning", {{"bug_id", bug.bug_id},
                              {"message", "fault kills no test input under the selected oracle"}});
    }

    auto pre = run_pre_mutants(m, bug, originals, record.oracle.oracle, fault_kp, eval_loss, rt);
    auto post = run_post_mutants(m, bug, originals, record.oracle.oracle, fault_kp, eval_loss, rt);
    report.rows.insert(report.rows.end(), std::make_move_iterator(pre.begin()),
                       std::make_move_iterator(pre.end()));
    report.rows.insert(report.rows.end(), std::make_move_iterator(post.begin()),
                       std::make_move_iterator(post.end()));
    report.bugs.push_back(std::move(record));
    rt.log.emit("bug_done", {{"bug_id", bug.bug_id}});
  }

  summarize(report);
  RunStats stats{rt.trainings.load(), rt.cache_hits.load()};
  rt.log.emit("run_done", {{"rows", report.rows.size()},
                           {"trainings", stats.trainings},
                           {"cache_hits", stats.cache_hits}});
  return {std::move(report), stats};
}

}  // namespace mutrealism
