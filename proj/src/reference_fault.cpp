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

#include "mutrealism/job.hpp"

#include <algorithm>
#include <cmath>

#include "mutrealism/error.hpp"
#include "mutrealism/hash.hpp"

namespace mutrealism {

std::uint64_t TrainingJob::content_hash() const {
  return Fnv1a().u64(data.content_hash()).u64(spec.content_hash()).digest();
}

std::vector<std::string> diff_jobs(const TrainingJob& a, const TrainingJob& b) {
  std::vector<std::string> out;
  const Split& ta = *a.data.train;
  const Split& tb = *b.data.train;
  if (ta.source_rows != tb.source_rows) {
    out.push_back("train_rows");
  } else {
    if (ta.labels != tb.labels) out.push_back("train_labels");
    if (!(ta.features == tb.features)) out.push_back("train_features");
  }
  if (a.data.test != b.data.test &&
      (!a.data.test || !b.data.test || !(*a.data.test == *b.data.test))) {
    out.push_back("test_split");
  }
  const TrainSpec& sa = a.spec;
  const TrainSpec& sb = b.spec;
  if (sa.learning_rate != sb.learning_rate) out.push_back("learning_rate");
  if (sa.epochs != sb.epochs) out.push_back("epochs");
  if (sa.batch_size != sb.batch_size) out.push_back("batch_size");
  if (sa.loss != sb.loss) out.push_back("loss");
  if (sa.weight_init != sb.weight_init) out.push_back("weight_init");
  if (sa.optimizer != sb.optimizer) out.push_back("optimizer");
  if (sa.seed != sb.seed) out.push_back("seed");
  const auto& la = sa.architecture.layers;
  const auto& lb = sb.architecture.layers;
  if (la.size() != lb.size()) {
    out.push_back("layer_count");
  } else {
    for (std::size_t l = 0; l < la.size(); ++l) {
      if (la[l].input_dim != lb[l].input_dim || la[l].output_dim != lb[l].output_dim) {
        out.push_back("layer_shape[" + std::to_string(l) + "]");
      }
      if (la[l].activation != lb[l].activation) {
        out.push_back("activation[" + std::to_string(l) + "]");
      }
    }
  }
  return out;
}

std::size_t count_for_rate(double rate, std::size_t n) {
  return static_cast<std::size_t>(std::floor(rate * double(n) + 0.5));
}

Split flip_labels(const Split& split, std::size_t count, std::size_t class_count,
                  RandomStream& rng, std::vector<std::size_t>* touched) {
  if (class_count < 2) {
    throw Error(ErrorCode::kInvalidArgument, "label flipping needs at least two classes");
  }
  Split out = split;
  auto picks = rng.sample_without_replacement(split.size(), count);
  for (std::size_t pos : picks) {
    // Uniform over the other classes.
    std::size_t shift = 1 + static_cast<std::size_t>(rng.below(class_count - 1));
    out.labels[pos] = (out.labels[pos] + shift) % class_count;
  }
  if (touched) *touched = picks;
  return out;
}

Split remove_rows(const Split& split, const std::vector<std::size_t>& positions) {
  std::vector<bool> drop(split.size(), false);
  for (std::size_t p : positions) {
    if (p < drop.size()) drop[p] = true;
  }
  std::size_t kept = static_cast<std::size_t>(std::count(drop.begin(), drop.end(), false));
  Split out;
  out.features = Matrix(kept, split.features.cols());
  std::size_t k = 0;
  for (std::size_t r = 0; r < split.size(); ++r) {
    if (drop[r]) continue;
    auto src = split.features.row(r);
    std::copy(src.begin(), src.end(), out.features.row(k).begin());
    out.labels.push_back(split.labels[r]);
    out.source_rows.push_back(split.source_rows[r]);
    ++k;
  }
  return out;
}

Split add_feature_noise(const Split& split, std::size_t count, double stddev,
                        RandomStream& rng, std::vector<std::size_t>* touched) {
  Split out = split;
  auto picks = rng.sample_without_replacement(split.size(), count);
  for (std::size_t pos : picks) {
    for (double& v : out.features.row(pos)) v += rng.normal(0.0, stddev);
  }
  if (touched) *touched = picks;
  return out;
}

std::string_view to_string(FaultOrigin o) noexcept {
  return o == FaultOrigin::kDataFault ? "data_fault" : "program_fault";
}

std::string_view to_string(ReferenceFaultKind k) noexcept {
  switch (k) {
    case ReferenceFaultKind::kLabelNoise: return "label_noise";
    case ReferenceFaultKind::kFeatureNoise: return "feature_noise";
    case ReferenceFaultKind::kLrMisconfig: return "lr_misconfig";
    case ReferenceFaultKind::kWrongActivation: return "wrong_activation";
    case ReferenceFaultKind::kMissingData: return "missing_data";
  }
  return "?";
}

ReferenceFaultKind parse_reference_fault_kind(std::string_view s) {
  for (auto k : {ReferenceFaultKind::kLabelNoise, ReferenceFaultKind::kFeatureNoise,
                 ReferenceFaultKind::kLrMisconfig, ReferenceFaultKind::kWrongActivation,
                 ReferenceFaultKind::kMissingData}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::kSchema, "unknown reference fault kind '" + std::string(s) + "'");
}

namespace {

void require_rate(double rate, const char* kind) {
  if (!(rate > 0.0 && rate < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(kind) + " rate must lie in (0, 1)");
  }
}

std::string format_value(double v) {
  std::string s = std::to_string(v);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

BugFixPair make_reference_fault(std::string bug_id, ReferenceFaultKind kind,
                                const FaultParams& params,
                                const TrainingJob& base, std::uint64_t seed) {
  BugFixPair pair;
  pair.bug_id = std::move(bug_id);
  pair.fixed = base;
  pair.faulty = base;
  RandomStream rng(derive_seed(seed, "reference-fault", static_cast<std::uint64_t>(kind)));
  const Split& train = *base.data.train;

  switch (kind) {
    case ReferenceFaultKind::kLabelNoise: {
      require_rate(params.rate, "label_noise");
      std::size_t count = count_for_rate(params.rate, train.size());
      pair.faulty.data = base.data.with_train(
          flip_labels(train, count, base.data.class_count, rng, &pair.touched_rows));
      pair.origin = FaultOrigin::kDataFault;
      pair.perturbation = "label_noise: " + std::to_string(count) + " of " +
                          std::to_string(train.size()) + " train labels changed";
      break;
    }
    case ReferenceFaultKind::kFeatureNoise: {
      require_rate(params.rate, "feature_noise");
      if (!(params.noise_std > 0.0)) {
        throw Error(ErrorCode::kInvalidArgument, "feature_noise noise_std must be > 0");
      }
      std::size_t count = count_for_rate(params.rate, train.size());
      pair.faulty.data = base.data.with_train(
          add_feature_noise(train, count, params.noise_std, rng, &pair.touched_rows));
      pair.origin = FaultOrigin::kDataFault;
      pair.perturbation = "feature_noise: N(0, " + format_value(params.noise_std) +
                          ") added to " + std::to_string(count) + " train rows";
      break;
    }
    case ReferenceFaultKind::kMissingData: {
      require_rate(params.rate, "missing_data");
      std::size_t count = count_for_rate(params.rate, train.size());
      pair.touched_rows = rng.sample_without_replacement(train.size(), count);
      pair.faulty.data = base.data.with_train(remove_rows(train, pair.touched_rows));
      pair.origin = FaultOrigin::kDataFault;
      pair.perturbation = "missing_data: " + std::to_string(count) + " of " +
                          std::to_string(train.size()) + " train rows removed";
      if (pair.faulty.spec.batch_size > pair.faulty.data.train->size()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "missing_data leaves fewer rows than the batch size");
      }
      break;
    }
    case ReferenceFaultKind::kLrMisconfig: {
      if (!(params.factor > 0.0) || params.factor == 1.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "lr_misconfig factor must be positive and != 1");
      }
      pair.faulty.spec.learning_rate = base.spec.learning_rate * params.factor;
      pair.origin = FaultOrigin::kProgramFault;
      pair.perturbation = "lr_misconfig: learning_rate x" + format_value(params.factor);
      break;
    }
    case ReferenceFaultKind::kWrongActivation: {
      if (!params.activation) {
        throw Error(ErrorCode::kInvalidArgument, "wrong_activation needs an activation");
      }
      auto& layers = pair.faulty.spec.architecture.layers;
      bool changed = false;
      for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
        if (layers[l].activation != *params.activation) {
          layers[l].activation = *params.activation;
          changed = true;
        }
      }
      if (!changed) {
        throw Error(ErrorCode::kInvalidArgument,
                    "wrong_activation does not change any hidden layer");
      }
      pair.origin = FaultOrigin::kProgramFault;
      pair.perturbation = "wrong_activation: hidden layers use " +
                          std::string(to_string(*params.activation));
      break;
    }
  }
  return pair;
}

}  // namespace mutrealism
