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

#include "mutrealism/engine.hpp"

#include <charconv>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "mutrealism/error.hpp"
#include "mutrealism/hash.hpp"
#include "mutrealism/rng.hpp"

namespace mutrealism {

namespace {

std::string shortest(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::optional<double> parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_index(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string_view to_string(OracleKind k) noexcept {
  return k == OracleKind::kAccuracy ? "accuracy" : "loss";
}

OracleKind parse_oracle_kind(std::string_view s) {
  if (s == "accuracy") return OracleKind::kAccuracy;
  if (s == "loss") return OracleKind::kLoss;
  throw Error(ErrorCode::kSchema, "unknown oracle '" + std::string(s) + "'");
}

std::string Oracle::describe() const {
  if (kind == OracleKind::kAccuracy) return "accuracy";
  return "loss(" + shortest(epsilon) + ")";
}

std::string_view to_string(Role r) noexcept {
  switch (r) {
    case Role::kOriginal: return "original";
    case Role::kFaulty: return "faulty";
    case Role::kMutant: return "mutant";
  }
  return "?";
}

std::size_t InstanceSet::valid_count() const {
  std::size_t n = 0;
  for (const auto& i : instances) n += i.valid() ? 1 : 0;
  return n;
}

std::vector<std::size_t> InstanceSet::invalid_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!instances[i].valid()) out.push_back(i);
  }
  return out;
}

void EventLog::emit(std::string_view event, Json fields) {
  if (sink_ == nullptr) return;
  Json line = Json::object();
  line["event"] = std::string(event);
  for (auto& [k, v] : fields.items()) line[k] = v;
  std::lock_guard<std::mutex> lock(mutex_);
  *sink_ << line.dump() << '\n';
  sink_->flush();
}

void Scheduler::parallel_for(std::size_t count,
                             const std::function<void(std::size_t)>& body) const {
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t threads = std::min(workers_, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) run(i);
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string predictions_to_csv(const PredictionBatch& predictions) {
  std::string out = "test_index,predicted_label,loss,valid\n";
  for (std::size_t t = 0; t < predictions.size(); ++t) {
    bool row_ok = true;
    if (!predictions.probabilities.empty()) {
      for (double v : predictions.probabilities.row(t)) row_ok = row_ok && std::isfinite(v);
    }
    std::string loss;
    if (!predictions.loss.empty()) {
      loss = shortest(predictions.loss[t]);
      row_ok = row_ok && std::isfinite(predictions.loss[t]);
    }
    out += std::to_string(t) + "," + std::to_string(predictions.predicted[t]) + "," +
           loss + "," + (row_ok && predictions.valid ? "1" : "0") + "\n";
  }
  return out;
}

PredictionBatch predictions_from_csv(std::string_view text) {
  CsvTable table = parse_csv(text);
  if (table.header != std::vector<std::string>{"test_index", "predicted_label", "loss", "valid"}) {
    throw Error(ErrorCode::kSchema, "unexpected predictions header");
  }
  PredictionBatch p;
  bool has_loss = !table.rows.empty() && !table.rows.front().at(2).empty();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != 4) throw Error(ErrorCode::kSchema, "malformed predictions row");
    auto index = parse_index(row[0]);
    auto label = parse_index(row[1]);
    if (!index || *index != r || !label) throw Error(ErrorCode::kSchema, "bad predictions row");
    p.predicted.push_back(*label);
    if (has_loss) {
      auto loss = parse_double(row[2]);
      if (!loss) throw Error(ErrorCode::kSchema, "bad loss value '" + row[2] + "'");
      p.loss.push_back(*loss);
    }
    if (row[3] != "1") p.valid = false;
  }
  return p;
}

std::string InstanceCache::key(const TrainingJob& job, std::uint64_t seed, Loss eval_loss) {
  return Fnv1a()
      .text(MUTREALISM_VERSION)
      .u64(job.content_hash())
      .u64(seed)
      .text(to_string(eval_loss))
      .hex();
}

std::optional<Instance> InstanceCache::load(const std::string& key,
                                            std::size_t test_rows) const {
  const auto weights_path = dir_ / (key + ".weights.json");
  const auto predictions_path = dir_ / (key + ".predictions.csv");
  std::error_code ec;
  if (!std::filesystem::exists(weights_path, ec) ||
      !std::filesystem::exists(predictions_path, ec)) {
    return std::nullopt;
  }
  try {
    Instance inst;
    inst.weights = load_weights(weights_path);
    inst.predictions = predictions_from_csv(read_file(predictions_path));
    if (inst.predictions.size() != test_rows) return std::nullopt;
    if (!inst.weights.valid) inst.predictions.valid = false;
    return inst;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void InstanceCache::store(const std::string& key, const Instance& instance) const {
  save_weights(instance.weights, dir_ / (key + ".weights.json"));
  write_file_atomic(dir_ / (key + ".predictions.csv"), predictions_to_csv(instance.predictions));
}

std::uint64_t instance_seed(std::uint64_t master_seed, std::size_t slot) {
  return derive_seed(master_seed, "train", slot);
}

Instance evaluate_instance(ModelWeights weights, const Dataset& data, Loss eval_loss,
                           std::uint64_t seed) {
  Instance inst;
  inst.seed = seed;
  inst.predictions = forward(weights, data.test->features, data.test->labels, eval_loss);
  inst.weights = std::move(weights);
  if (!inst.weights.valid) inst.predictions.valid = false;
  return inst;
}

std::vector<Instance> train_instances(const std::vector<InstanceJob>& jobs,
                                      Loss eval_loss, const EngineContext& ctx) {
  std::vector<Instance> out(jobs.size());
  Scheduler inline_scheduler(1);
  const Scheduler& scheduler = ctx.scheduler ? *ctx.scheduler : inline_scheduler;
  scheduler.parallel_for(jobs.size(), [&](std::size_t i) {
    const TrainingJob& job = *jobs[i].job;
    const std::uint64_t seed = jobs[i].seed;
    std::string key;
    if (ctx.cache) {
      key = InstanceCache::key(job, seed, eval_loss);
      if (auto hit = ctx.cache->load(key, job.data.test->size())) {
        hit->seed = seed;
        out[i] = std::move(*hit);
        if (ctx.cache_hits) ++*ctx.cache_hits;
        return;
      }
    }
    ModelWeights w = train(job.spec, job.data, seed);
    if (ctx.trainings) ++*ctx.trainings;
    out[i] = evaluate_instance(std::move(w), job.data, eval_loss, seed);
    if (ctx.cache) ctx.cache->store(key, out[i]);
  });
  return out;
}

void require_trainable(const InstanceSet& set) {
  if (set.n_declared > 0 && set.valid_count() == 0) {
    throw Error(ErrorCode::kSubjectUntrainable,
                "subject untrainable: all " + std::to_string(set.n_declared) + " " +
                    std::string(to_string(set.role)) + " instances of '" + set.label +
                    "' are invalid");
  }
}

InstanceSet train_instance_set(const TrainingJob& job, Role role, std::size_t n,
                               std::uint64_t master_seed, const EngineContext& ctx,
                               std::string label, std::optional<Loss> eval_loss) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "instance count must be >= 1");
  if (n == 1 && ctx.log) {
    ctx.log->emit("warning", {{"message", "n = 1: killing probabilities are 0 or 1"},
                              {"label", label}});
  }
  std::vector<InstanceJob> jobs;
  for (std::size_t i = 0; i < n; ++i) jobs.push_back({&job, instance_seed(master_seed, i)});
  InstanceSet set;
  set.role = role;
  set.label = std::move(label);
  set.n_declared = n;
  set.instances = train_instances(jobs, eval_loss.value_or(job.spec.loss), ctx);
  require_trainable(set);
  return set;
}

ExecutionMatrix build_execution_matrix(const InstanceSet& target,
                                       const InstanceSet& originals,
                                       const Dataset& data, const Oracle& oracle) {
  if (target.instances.size() != originals.instances.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "instance sets are not index-aligned (" +
                    std::to_string(target.instances.size()) + " vs " +
                    std::to_string(originals.instances.size()) + ")");
  }
  const Split& test = *data.test;
  ExecutionMatrix m;
  m.tests = test.size();
  m.n_declared = target.instances.size();
  m.oracle = oracle;
  for (std::size_t i = 0; i < target.instances.size(); ++i) {
    const Instance& x = target.instances[i];
    const Instance& o = originals.instances[i];
    if (!x.valid() || !o.valid()) {
      m.excluded.push_back(i);
      continue;
    }
    if (x.predictions.size() != m.tests || o.predictions.size() != m.tests) {
      throw Error(ErrorCode::kShapeMismatch, "predictions do not cover the test split");
    }
    if (oracle.kind == OracleKind::kLoss &&
        (x.predictions.loss.size() != m.tests || o.predictions.loss.size() != m.tests)) {
      throw Error(ErrorCode::kShapeMismatch, "loss oracle needs per-input losses");
    }
    m.columns.push_back(i);
  }
  if (m.columns.empty()) {
    throw Error(ErrorCode::kNoObservableBehavior,
                "no observable behavior: no valid instance pair for '" + target.label + "'");
  }
  const std::size_t cols = m.columns.size();
  m.cells.assign(m.tests * cols, 0);
  for (std::size_t j = 0; j < cols; ++j) {
    const auto& xp = target.instances[m.columns[j]].predictions;
    const auto& op = originals.instances[m.columns[j]].predictions;
    for (std::size_t t = 0; t < m.tests; ++t) {
      bool kill;
      if (oracle.kind == OracleKind::kAccuracy) {
        const std::size_t y = test.labels[t];
        kill = op.predicted[t] == y && xp.predicted[t] != y;
      } else {
        kill = xp.loss[t] > op.loss[t] + oracle.epsilon;
      }
      m.cells[t * cols + j] = kill ? 1 : 0;
    }
  }
  return m;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::kOk: return "ok";
    case Verdict::kWarn: return "warn";
    case Verdict::kBlock: return "block";
  }
  return "?";
}

ScreeningVerdict screen_subject(const InstanceSet& originals,
                                const InstanceSet& faulty, const Dataset& data) {
  ScreeningVerdict v;
  const auto& labels = data.test->labels;
  std::vector<double> mean_losses;
  bool saturated = true;
  std::size_t valid = 0;
  for (const InstanceSet* set : {&originals, &faulty}) {
    for (const auto& inst : set->instances) {
      if (!inst.valid()) continue;
      ++valid;
      if (inst.predictions.accuracy(labels) != 1.0) saturated = false;
      mean_losses.push_back(inst.predictions.mean_loss());
    }
  }
  v.accuracy_saturated = valid > 0 && saturated;
  if (!mean_losses.empty()) {
    double mean = 0.0;
    for (double l : mean_losses) mean += l;
    mean /= double(mean_losses.size());
    double ss = 0.0;
    for (double l : mean_losses) ss += (l - mean) * (l - mean);
    v.loss_variance = ss / double(mean_losses.size());
  }
  auto counts = class_counts(*data.train, data.class_count);
  std::size_t largest = 0;
  for (std::size_t c : counts) largest = std::max(largest, c);
  v.class_imbalance_ratio = data.train->size() ? double(largest) / double(data.train->size()) : 0.0;

  if (v.accuracy_saturated && v.loss_variance == 0.0) {
    v.verdict = Verdict::kBlock;
    v.notes.push_back("accuracy saturated and loss shows no variance: no discriminatory signal");
  } else {
    if (v.accuracy_saturated) {
      v.verdict = Verdict::kWarn;
      v.notes.push_back("accuracy saturated at 1.0 for every original and faulty instance");
    }
    if (v.class_imbalance_ratio > kSevereImbalance) {
      v.verdict = Verdict::kWarn;
      v.notes.push_back("severe class imbalance in the training split");
    }
  }
  return v;
}

std::string_view to_string(OracleMode m) noexcept {
  switch (m) {
    case OracleMode::kAuto: return "auto";
    case OracleMode::kAccuracy: return "accuracy";
    case OracleMode::kLoss: return "loss";
  }
  return "?";
}

OracleMode parse_oracle_mode(std::string_view s) {
  if (s == "auto") return OracleMode::kAuto;
  if (s == "accuracy") return OracleMode::kAccuracy;
  if (s == "loss") return OracleMode::kLoss;
  throw Error(ErrorCode::kSchema, "unknown oracle mode '" + std::string(s) + "'");
}

OracleDecision select_oracle(const ScreeningVerdict& verdict, const OracleConfig& config) {
  OracleDecision d;
  d.oracle.epsilon = config.epsilon;
  if (verdict.verdict == Verdict::kBlock && !config.override_screening) {
    std::ostringstream msg;
    msg << "screening blocked the subject: accuracy_saturated="
        << (verdict.accuracy_saturated ? "true" : "false")
        << " loss_variance=" << verdict.loss_variance
        << " class_imbalance_ratio=" << verdict.class_imbalance_ratio;
    for (const auto& n : verdict.notes) msg << "; " << n;
    throw Error(ErrorCode::kScreeningBlock, msg.str());
  }
  switch (config.mode) {
    case OracleMode::kAccuracy:
      d.oracle.kind = OracleKind::kAccuracy;
      d.reason = "accuracy oracle forced by configuration";
      break;
    case OracleMode::kLoss:
      d.oracle.kind = OracleKind::kLoss;
      d.reason = "loss oracle forced by configuration";
      break;
    case OracleMode::kAuto:
      if (verdict.accuracy_saturated && verdict.loss_variance > 0.0) {
        d.oracle.kind = OracleKind::kLoss;
        d.reason = "accuracy saturated with non-zero loss variance: loss fallback";
      } else {
        d.oracle.kind = OracleKind::kAccuracy;
        d.reason = "default accuracy oracle";
      }
      break;
  }
  if (verdict.verdict == Verdict::kBlock) d.reason += " (screening block overridden)";
  return d;
}

}  // namespace mutrealism
