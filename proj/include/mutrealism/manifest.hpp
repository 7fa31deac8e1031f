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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mutrealism/engine.hpp"
#include "mutrealism/job.hpp"
#include "mutrealism/metrics.hpp"
#include "mutrealism/post_mutation.hpp"
#include "mutrealism/pre_mutation.hpp"
#include "mutrealism/serialize.hpp"

namespace mutrealism {

inline constexpr int kManifestSchemaVersion = 1;

struct ReferenceFaultSpec {
  ReferenceFaultKind kind = ReferenceFaultKind::kLabelNoise;
  FaultParams params;
  std::uint64_t seed = 0;
};

struct ExplicitFaultySpec {
  Json dataset;     // dataset source; null means "same as fixed"
  Json train_spec;  // overrides applied to the fixed train spec
  FaultOrigin origin = FaultOrigin::kDataFault;
};

struct BugSource {
  std::string bug_id;
  Json dataset;     // {"path", "label_column", ...} or {"generator", ...}
  Json train_spec;  // defaults merged with per-bug overrides
  std::optional<ReferenceFaultSpec> fault;
  std::optional<ExplicitFaultySpec> faulty;
};

struct ExperimentManifest {
  int schema_version = kManifestSchemaVersion;
  std::string name;
  std::uint64_t master_seed = 0;
  std::size_t n_instances = 5;
  std::size_t jobs = 1;
  std::filesystem::path base_dir;
  std::filesystem::path output_dir;
  bool cache_enabled = true;
  std::filesystem::path cache_dir;
  std::vector<BugSource> bugs;
  std::vector<PreOperatorConfig> pre_operators;
  bool filter_trivial_pre = true;
  std::vector<PostOperator> post_operators;
  std::optional<ScenarioPlan> scenario1;
  std::optional<ScenarioPlan> scenario2;
  OracleConfig oracle;
  TieRule tie_rule;
  /// Canonical JSON text of the manifest and its content hash.
  std::string canonical;
  std::string hash;
};

/// Environment variable overriding the cache directory.
inline constexpr const char* kCacheDirEnv = "MUTREALISM_CACHE_DIR";

/// Parses and validates. Relative paths resolve against `base_dir`. Throws
/// Error(kManifestInvalid) naming the offending field; referenced CSV files
/// must exist.
ExperimentManifest parse_manifest(const Json& j, const std::filesystem::path& base_dir);
ExperimentManifest load_manifest(const std::filesystem::path& path);

/// Built-in train spec defaults; "hidden_layers", "hidden_activation" and
/// "head_activation" describe an MLP whose input and output widths come from
/// the dataset when no explicit "architecture" is given.
Json default_train_spec_json();

Dataset load_dataset_source(const Json& source, const std::filesystem::path& base_dir,
                            bool normalize = true);
TrainSpec resolve_train_spec(const Json& spec, const Dataset& data);

/// The fixed job and its faulty counterpart for one bug.
BugFixPair build_bug(const BugSource& bug, const ExperimentManifest& manifest);

}  // namespace mutrealism
