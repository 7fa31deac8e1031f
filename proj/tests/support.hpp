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
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include <unistd.h>

#include "mutrealism/dataset.hpp"
#include "mutrealism/execution_matrix.hpp"
#include "mutrealism/job.hpp"
#include "mutrealism/nn.hpp"
#include "mutrealism/serialize.hpp"

namespace mutrealism::testing {

inline Dataset small_blobs(double separation = 4.0, std::uint64_t seed = 1,
                           std::size_t classes = 3, std::size_t per_class = 40,
                           std::size_t dim = 3) {
  BlobSpec s;
  s.classes = classes;
  s.per_class = per_class;
  s.dim = dim;
  s.separation = separation;
  s.seed = seed;
  s.test_fraction = 0.25;
  return gen_blobs(s);
}

inline TrainSpec small_spec(const Dataset& data, std::vector<std::size_t> hidden = {8},
                            std::size_t epochs = 20) {
  std::vector<std::size_t> widths{data.feature_dim()};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(data.class_count);
  TrainSpec spec;
  spec.architecture = Architecture::mlp(widths, Activation::kRelu, Activation::kSoftmax);
  spec.epochs = epochs;
  spec.batch_size = 16;
  return spec;
}

inline TrainingJob small_job(double separation = 4.0, std::vector<std::size_t> hidden = {8},
                             std::size_t epochs = 20) {
  TrainingJob job;
  job.data = small_blobs(separation);
  job.spec = small_spec(job.data, std::move(hidden), epochs);
  return job;
}

/// Matrix with every column kept; `cells` is tests x n row-major.
inline ExecutionMatrix make_matrix(std::size_t tests, std::size_t n,
                                   std::vector<std::uint8_t> cells) {
  ExecutionMatrix m;
  m.tests = tests;
  m.n_declared = n;
  m.columns.resize(n);
  std::iota(m.columns.begin(), m.columns.end(), std::size_t{0});
  m.cells = std::move(cells);
  return m;
}

/// Fresh directory removed on destruction.
/// Small two-bug experiment: TCL plus GF/WS in both post-training scenarios.
inline Json tiny_manifest(std::uint64_t master_seed = 11) {
  Json blobs{{"generator", "blobs"}, {"classes", 3}, {"per_class", 30},
             {"dim", 3},             {"separation", 3.0}, {"seed", 2}};
  Json bugs = Json::array();
  bugs.push_back({{"bug_id", "noise"},
                  {"dataset", blobs},
                  {"fault", {{"kind", "label_noise"}, {"params", {{"rate", 0.3}}}}}});
  bugs.push_back({{"bug_id", "lr"},
                  {"dataset", blobs},
                  {"fault", {{"kind", "lr_misconfig"}, {"params", {{"factor", 20.0}}}}}});
  return Json{{"schema_version", 1},
              {"name", "tiny"},
              {"master_seed", master_seed},
              {"n_instances", 3},
              {"defaults", {{"train_spec", {{"epochs", 8}, {"hidden_layers", {8}}}}}},
              {"bugs", bugs},
              {"pre_operators", {{{"id", "TCL"}}}},
              {"post_operators", {"GF", "WS"}},
              {"scenario1", {{"repetitions", 2}}},
              {"scenario2", {{"ratios", {0.1, 0.5}}}}};
}

/// Screening blocks: every instance predicts the majority class with the
/// same loss because all weights start at zero and batches are full.
inline Json blocking_manifest(const std::string& skewed_csv) {
  return Json{{"schema_version", 1},
              {"name", "blocked"},
              {"n_instances", 2},
              {"defaults", {{"train_spec", {{"weight_init", "zeros"}, {"optimizer", "sgd"},
                                            {"batch_size", 8}, {"epochs", 3},
                                            {"hidden_layers", {4}}}}}},
              {"bugs", {{{"bug_id", "flat"},
                         {"dataset", {{"path", skewed_csv}, {"label_column", "species"}}},
                         {"faulty", {{"train_spec", {{"hidden_activation", "tanh"}}}}}}}},
              {"pre_operators", {{{"id", "TCL"}}}}};
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("mutrealism-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace mutrealism::testing
