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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mutrealism/execution_matrix.hpp"
#include "mutrealism/job.hpp"
#include "mutrealism/nn.hpp"
#include "mutrealism/serialize.hpp"

namespace mutrealism {

enum class Role { kOriginal, kFaulty, kMutant };
std::string_view to_string(Role r) noexcept;

/// One trained (or mutated) realization and its cached test-set predictions.
struct Instance {
  ModelWeights weights;
  PredictionBatch predictions;
  std::uint64_t seed = 0;

  bool valid() const noexcept { return weights.valid && predictions.valid; }
};

/// n index-aligned instances of one model configuration. Instance i of every
/// set belonging to a bug derives from seed slot i.
struct InstanceSet {
  Role role = Role::kOriginal;
  std::string label;
  std::size_t n_declared = 0;
  std::vector<Instance> instances;

  std::size_t valid_count() const;
  std::vector<std::size_t> invalid_indices() const;
};

/// Line-delimited JSON events. Thread-safe; a null sink discards events.
class EventLog {
 public:
  explicit EventLog(std::ostream* sink = nullptr) : sink_(sink) {}
  void emit(std::string_view event, Json fields = Json::object());

 private:
  std::ostream* sink_;
  std::mutex mutex_;
};

/// Fixed-size worker pool for independent jobs. Results must be written to
/// per-index slots; the first exception (lowest index) is rethrown after all
/// jobs have finished.
class Scheduler {
 public:
  explicit Scheduler(std::size_t workers = 1) : workers_(workers ? workers : 1) {}
  std::size_t workers() const noexcept { return workers_; }
  void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) const;

 private:
  std::size_t workers_;
};

/// On-disk cache of trained instances keyed by the content hash of
/// (job, seed, evaluation loss). Each entry is a weight JSON plus a
/// predictions CSV with columns test_index,predicted_label,loss,valid.
class InstanceCache {
 public:
  explicit InstanceCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const noexcept { return dir_; }
  static std::string key(const TrainingJob& job, std::uint64_t seed, Loss eval_loss);

  /// Empty on a miss or an unreadable entry.
  std::optional<Instance> load(const std::string& key, std::size_t test_rows) const;
  void store(const std::string& key, const Instance& instance) const;

 private:
  std::filesystem::path dir_;
};

std::string predictions_to_csv(const PredictionBatch& predictions);
PredictionBatch predictions_from_csv(std::string_view text);

struct EngineContext {
  const Scheduler* scheduler = nullptr;
  const InstanceCache* cache = nullptr;
  EventLog* log = nullptr;
  std::atomic<std::size_t>* trainings = nullptr;
  std::atomic<std::size_t>* cache_hits = nullptr;
};

/// Seed of instance slot i. Shared by every role of a bug so that instance i
/// of the original, faulty and pre-training mutant sets start from the same
/// initialization and batch order.
std::uint64_t instance_seed(std::uint64_t master_seed, std::size_t slot);

/// Predictions of `weights` on the job's frozen test split.
Instance evaluate_instance(ModelWeights weights, const Dataset& data, Loss eval_loss,
                           std::uint64_t seed = 0);

struct InstanceJob {
  const TrainingJob* job;
  std::uint64_t seed;
};

/// Trains a flat list of jobs (possibly from different configurations) on
/// the scheduler, consulting the cache first.
std::vector<Instance> train_instances(const std::vector<InstanceJob>& jobs,
                                      Loss eval_loss, const EngineContext& ctx);

/// n trainings with seeds instance_seed(master_seed, i). Throws
/// Error(kSubjectUntrainable) when every instance is invalid.
InstanceSet train_instance_set(const TrainingJob& job, Role role, std::size_t n,
                               std::uint64_t master_seed, const EngineContext& ctx = {},
                               std::string label = {},
                               std::optional<Loss> eval_loss = std::nullopt);

/// Throws Error(kSubjectUntrainable) when no instance of `set` is valid.
void require_trainable(const InstanceSet& set);

/// Killing-input matrix of `target` against `originals` on the test split.
/// Throws Error(kNoObservableBehavior) when no valid pair remains and
/// Error(kShapeMismatch) when the sets are not index-aligned.
ExecutionMatrix build_execution_matrix(const InstanceSet& target,
                                       const InstanceSet& originals,
                                       const Dataset& data, const Oracle& oracle);

enum class Verdict { kOk, kWarn, kBlock };
std::string_view to_string(Verdict v) noexcept;

struct ScreeningVerdict {
  bool accuracy_saturated = false;
  double loss_variance = 0.0;
  double class_imbalance_ratio = 0.0;
  Verdict verdict = Verdict::kOk;
  std::vector<std::string> notes;
};

/// Imbalance ratio above which screening warns.
inline constexpr double kSevereImbalance = 0.9;

ScreeningVerdict screen_subject(const InstanceSet& originals,
                                const InstanceSet& faulty, const Dataset& data);

enum class OracleMode { kAuto, kAccuracy, kLoss };
std::string_view to_string(OracleMode m) noexcept;
OracleMode parse_oracle_mode(std::string_view s);

struct OracleConfig {
  OracleMode mode = OracleMode::kAuto;
  double epsilon = 1e-6;
  bool override_screening = false;
};

struct OracleDecision {
  Oracle oracle;
  std::string reason;
};

/// Accuracy by default; loss(eps) when accuracy saturates with non-zero loss
/// variance. A blocking verdict throws Error(kScreeningBlock) unless
/// overridden. A forced mode is honored as long as screening does not block.
OracleDecision select_oracle(const ScreeningVerdict& verdict, const OracleConfig& config);

}  // namespace mutrealism
