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

#include "mutrealism/manifest.hpp"

#include <cstdlib>
#include <set>

#include "mutrealism/error.hpp"
#include "mutrealism/hash.hpp"
#include "mutrealism/rng.hpp"

namespace mutrealism {

namespace {

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kManifestInvalid, "manifest " + where + ": " + what);
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    invalid(where + "." + key, e.what());
  }
}

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal();
}

ParamValue param_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  invalid(where, "grid values must be numbers or names");
}

void check_dataset_source(const Json& source, const std::filesystem::path& base,
                          const std::string& where) {
  if (!source.is_object()) invalid(where, "dataset must be an object");
  if (source.contains("path")) {
    if (!source.at("path").is_string()) invalid(where + ".path", "must be a string");
    auto path = resolve_path(base, source.at("path").get<std::string>());
    if (!std::filesystem::exists(path)) invalid(where + ".path", "file not found: " + path.string());
    if (!source.contains("label_column") || !source.at("label_column").is_string()) {
      invalid(where + ".label_column", "required string");
    }
    double f = get_or<double>(source, "test_fraction", 0.2, where);
    if (!(f >= 0.0 && f < 1.0)) invalid(where + ".test_fraction", "must lie in [0, 1)");
  } else if (source.contains("generator")) {
    auto g = get_or<std::string>(source, "generator", "", where);
    if (g != "blobs" && g != "imbalanced") invalid(where + ".generator", "unknown generator '" + g + "'");
  } else {
    invalid(where, "dataset needs either 'path' or 'generator'");
  }
}

FaultParams fault_params_from_json(const Json& j, const std::string& where) {
  FaultParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) invalid(where, "params must be an object");
  p.rate = get_or<double>(j, "rate", p.rate, where);
  p.factor = get_or<double>(j, "factor", p.factor, where);
  p.noise_std = get_or<double>(j, "noise_std", p.noise_std, where);
  if (j.contains("activation")) {
    try {
      p.activation = parse_activation(j.at("activation").get<std::string>());
    } catch (const std::exception& e) {
      invalid(where + ".activation", e.what());
    }
  }
  return p;
}

ScenarioPlan scenario_from_json(const Json& j, Scenario s, const std::string& where) {
  if (!j.is_object()) invalid(where, "must be an object");
  ScenarioPlan plan;
  plan.scenario = s;
  if (s == Scenario::kPostS1) {
    plan.repetitions = get_or<std::size_t>(j, "repetitions", 5, where);
    plan.default_ratio = get_or<double>(j, "default_ratio", 0.01, where);
    if (plan.repetitions < 1) invalid(where + ".repetitions", "must be >= 1");
    if (!(plan.default_ratio >= 0.0 && plan.default_ratio <= 1.0)) {
      invalid(where + ".default_ratio", "must lie in [0, 1]");
    }
  } else {
    plan.ratios = get_or<std::vector<double>>(j, "ratios", {0.01, 0.1, 0.2, 0.6, 1.0}, where);
    for (double r : plan.ratios) {
      if (!(r >= 0.0 && r <= 1.0)) invalid(where + ".ratios", "ratios must lie in [0, 1]");
    }
  }
  return plan;
}

}  // namespace

Json default_train_spec_json() {
  return Json{{"optimizer", "adam"},
              {"learning_rate", 0.01},
              {"epochs", 30},
              {"batch_size", 16},
              {"loss", "cross_entropy"},
              {"weight_init", "xavier_uniform"},
              {"seed", 0},
              {"hidden_layers", Json::array({16, 16})},
              {"hidden_activation", "relu"},
              {"head_activation", "softmax"}};
}

ExperimentManifest parse_manifest(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) invalid("root", "must be a JSON object");
  ExperimentManifest m;
  m.base_dir = base_dir;
  m.schema_version = get_or<int>(j, "schema_version", -1, "root");
  if (m.schema_version != kManifestSchemaVersion) {
    invalid("schema_version", "expected " + std::to_string(kManifestSchemaVersion));
  }
  m.name = get_or<std::string>(j, "name", "experiment", "root");
  m.master_seed = get_or<std::uint64_t>(j, "master_seed", 0, "root");
  m.n_instances = get_or<std::size_t>(j, "n_instances", 5, "root");
  if (m.n_instances < 1) invalid("n_instances", "must be >= 1");
  m.jobs = get_or<std::size_t>(j, "jobs", 1, "root");
  if (m.jobs < 1) invalid("jobs", "must be >= 1");

  m.output_dir = resolve_path(base_dir, get_or<std::string>(j, "output_dir", "out", "root"));
  const Json cache = j.value("cache", Json::object());
  m.cache_enabled = get_or<bool>(cache, "enabled", true, "cache");
  m.cache_dir = cache.contains("dir")
                    ? resolve_path(base_dir, get_or<std::string>(cache, "dir", "", "cache"))
                    : m.output_dir / "cache";
  if (const char* env = std::getenv(kCacheDirEnv); env && *env) m.cache_dir = env;

  Json spec_defaults = default_train_spec_json();
  if (j.contains("defaults") && j.at("defaults").contains("train_spec")) {
    spec_defaults.merge_patch(j.at("defaults").at("train_spec"));
  }

  if (!j.contains("bugs") || !j.at("bugs").is_array() || j.at("bugs").empty()) {
    invalid("bugs", "at least one bug is required");
  }
  std::set<std::string> ids;
  for (std::size_t b = 0; b < j.at("bugs").size(); ++b) {
    const Json& entry = j.at("bugs")[b];
    const std::string where = "bugs[" + std::to_string(b) + "]";
    BugSource bug;
    bug.bug_id = get_or<std::string>(entry, "bug_id", "", where);
    if (bug.bug_id.empty()) invalid(where + ".bug_id", "required non-empty string");
    if (!ids.insert(bug.bug_id).second) invalid(where + ".bug_id", "duplicate id '" + bug.bug_id + "'");
    if (!entry.contains("dataset")) invalid(where + ".dataset", "required");
    bug.dataset = entry.at("dataset");
    check_dataset_source(bug.dataset, base_dir, where + ".dataset");
    bug.train_spec = spec_defaults;
    if (entry.contains("train_spec")) bug.train_spec.merge_patch(entry.at("train_spec"));

    if (entry.contains("fault")) {
      const Json& f = entry.at("fault");
      ReferenceFaultSpec spec;
      try {
        spec.kind = parse_reference_fault_kind(get_or<std::string>(f, "kind", "", where + ".fault"));
      } catch (const Error& e) {
        invalid(where + ".fault.kind", e.what());
      }
      spec.params = fault_params_from_json(f.value("params", Json()), where + ".fault.params");
      spec.seed = get_or<std::uint64_t>(f, "seed", derive_seed(m.master_seed, "fault/" + bug.bug_id),
                                        where + ".fault");
      bug.fault = spec;
    } else if (entry.contains("faulty")) {
      const Json& f = entry.at("faulty");
      ExplicitFaultySpec spec;
      spec.dataset = f.value("dataset", Json());
      if (!spec.dataset.is_null()) check_dataset_source(spec.dataset, base_dir, where + ".faulty.dataset");
      spec.train_spec = f.value("train_spec", Json::object());
      auto origin = get_or<std::string>(f, "origin", "", where + ".faulty");
      if (origin == "data_fault") {
        spec.origin = FaultOrigin::kDataFault;
      } else if (origin == "program_fault") {
        spec.origin = FaultOrigin::kProgramFault;
      } else if (origin.empty()) {
        spec.origin = spec.dataset.is_null() ? FaultOrigin::kProgramFault : FaultOrigin::kDataFault;
      } else {
        invalid(where + ".faulty.origin", "must be data_fault or program_fault");
      }
      if (spec.dataset.is_null() == spec.train_spec.empty()) {
        invalid(where + ".faulty", "exactly one of dataset or train_spec must differ from the fixed variant");
      }
      bug.faulty = spec;
    } else {
      invalid(where, "needs a 'fault' generator or an explicit 'faulty' variant");
    }
    m.bugs.push_back(std::move(bug));
  }

  if (j.contains("pre_operators")) {
    const Json& ops = j.at("pre_operators");
    if (!ops.is_array()) invalid("pre_operators", "must be an array");
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const std::string where = "pre_operators[" + std::to_string(i) + "]";
      PreOperatorConfig cfg;
      try {
        cfg.op = parse_pre_operator(get_or<std::string>(ops[i], "id", "", where));
      } catch (const Error& e) {
        invalid(where + ".id", e.what());
      }
      if (ops[i].contains("grid")) {
        if (!ops[i].at("grid").is_array()) invalid(where + ".grid", "must be an array");
        for (const auto& v : ops[i].at("grid")) cfg.grid.push_back(param_from_json(v, where + ".grid"));
      } else {
        cfg.grid = default_grid(cfg.op);
      }
      for (const auto& v : cfg.grid) {
        try {
          validate_pre_param(cfg.op, v);
        } catch (const Error& e) {
          invalid(where + ".grid", e.what());
        }
      }
      m.pre_operators.push_back(std::move(cfg));
    }
  }
  m.filter_trivial_pre = get_or<bool>(j, "filter_trivial_pre", true, "root");

  if (j.contains("post_operators")) {
    for (const auto& name : get_or<std::vector<std::string>>(j, "post_operators", {}, "root")) {
      try {
        m.post_operators.push_back(parse_post_operator(name));
      } catch (const Error& e) {
        invalid("post_operators", e.what());
      }
    }
  }
  if (j.contains("scenario1")) m.scenario1 = scenario_from_json(j.at("scenario1"), Scenario::kPostS1, "scenario1");
  if (j.contains("scenario2")) m.scenario2 = scenario_from_json(j.at("scenario2"), Scenario::kPostS2, "scenario2");
  if (!m.post_operators.empty() && !m.scenario1 && !m.scenario2) {
    invalid("post_operators", "listed without scenario1 or scenario2");
  }
  if (m.pre_operators.empty() && m.post_operators.empty()) {
    invalid("root", "no pre_operators or post_operators selected");
  }

  const Json oracle = j.value("oracle", Json::object());
  try {
    m.oracle.mode = parse_oracle_mode(get_or<std::string>(oracle, "mode", "auto", "oracle"));
  } catch (const Error& e) {
    invalid("oracle.mode", e.what());
  }
  m.oracle.epsilon = get_or<double>(oracle, "epsilon", 1e-6, "oracle");
  if (!(m.oracle.epsilon >= 0.0)) invalid("oracle.epsilon", "must be >= 0");
  m.oracle.override_screening = get_or<bool>(oracle, "override_screening", false, "oracle");

  const Json tie = j.value("tie_rule", Json::object());
  auto post_winner = get_or<std::string>(tie, "post_tie_winner", "post_s2", "tie_rule");
  if (post_winner == "post_s2") {
    m.tie_rule.post_tie_winner = Scenario::kPostS2;
  } else if (post_winner == "post_s1") {
    m.tie_rule.post_tie_winner = Scenario::kPostS1;
  } else {
    invalid("tie_rule.post_tie_winner", "must be post_s1 or post_s2");
  }

  m.canonical = j.dump();
  m.hash = Fnv1a().text(m.canonical).hex();
  return m;
}

ExperimentManifest load_manifest(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kManifestInvalid, e.what());
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kManifestInvalid, "manifest is not valid JSON: " + std::string(e.what()));
  }
  auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return parse_manifest(j, base);
}

Dataset load_dataset_source(const Json& source, const std::filesystem::path& base_dir,
                            bool normalize) {
  if (source.contains("path")) {
    CsvSchema schema;
    schema.label_column = source.at("label_column").get<std::string>();
    schema.categorical_columns =
        source.value("categorical_columns", std::vector<std::string>{});
    SplitSpec split;
    split.test_fraction = source.value("test_fraction", 0.2);
    split.split_seed = source.value("split_seed", std::uint64_t{0});
    split.normalize = normalize;
    return load_csv(resolve_path(base_dir, source.at("path").get<std::string>()), schema, split);
  }
  const std::string g = source.at("generator").get<std::string>();
  if (g == "blobs") {
    BlobSpec s;
    s.classes = source.value("classes", s.classes);
    s.per_class = source.value("per_class", s.per_class);
    s.dim = source.value("dim", s.dim);
    s.separation = source.value("separation", s.separation);
    s.seed = source.value("seed", s.seed);
    s.test_fraction = source.value("test_fraction", s.test_fraction);
    return gen_blobs(s);
  }
  if (g == "imbalanced") {
    ImbalancedSpec s;
    s.majority_fraction = source.value("majority_fraction", s.majority_fraction);
    s.rows = source.value("rows", s.rows);
    s.classes = source.value("classes", s.classes);
    s.dim = source.value("dim", s.dim);
    s.separation = source.value("separation", s.separation);
    s.seed = source.value("seed", s.seed);
    s.test_fraction = source.value("test_fraction", s.test_fraction);
    return gen_imbalanced(s);
  }
  throw Error(ErrorCode::kManifestInvalid, "unknown generator '" + g + "'");
}

TrainSpec resolve_train_spec(const Json& spec, const Dataset& data) {
  TrainSpec s = train_spec_from_json(spec);
  if (!spec.contains("architecture")) {
    std::vector<std::size_t> widths{data.feature_dim()};
    for (const auto& h : spec.value("hidden_layers", Json::array())) widths.push_back(h.get<std::size_t>());
    widths.push_back(data.class_count);
    s.architecture = Architecture::mlp(
        widths, parse_activation(spec.value("hidden_activation", std::string("relu"))),
        parse_activation(spec.value("head_activation", std::string("softmax"))));
  }
  s.validate(data.train->size());
  return s;
}

BugFixPair build_bug(const BugSource& bug, const ExperimentManifest& manifest) {
  try {
    TrainingJob fixed;
    fixed.data = load_dataset_source(bug.dataset, manifest.base_dir);
    fixed.spec = resolve_train_spec(bug.train_spec, fixed.data);
    if (bug.fault) {
      return make_reference_fault(bug.bug_id, bug.fault->kind, bug.fault->params, fixed,
                                  bug.fault->seed);
    }
    const ExplicitFaultySpec& f = *bug.faulty;
    BugFixPair pair;
    pair.bug_id = bug.bug_id;
    pair.origin = f.origin;
    pair.fixed = fixed;
    pair.faulty = fixed;
    if (!f.dataset.is_null()) {
      Dataset raw = load_dataset_source(f.dataset, manifest.base_dir, false);
      if (raw.feature_names != fixed.data.feature_names ||
          raw.class_names != fixed.data.class_names) {
        throw Error(ErrorCode::kManifestInvalid,
                    "faulty dataset has different feature or label columns");
      }
      Split train = *raw.train;
      if (train.source_rows != fixed.data.train->source_rows) {
        throw Error(ErrorCode::kManifestInvalid,
                    "faulty dataset must have the same rows and split as the fixed dataset");
      }
      if (fixed.data.normalizer) train.features = fixed.data.normalizer->apply(train.features);
      pair.faulty.data = fixed.data.with_train(std::move(train));
      pair.perturbation = "explicit faulty dataset";
    } else {
      Json merged = bug.train_spec;
      merged.merge_patch(f.train_spec);
      pair.faulty.spec = resolve_train_spec(merged, fixed.data);
      pair.perturbation = "explicit faulty train_spec";
    }
    return pair;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kManifestInvalid) throw;
    throw Error(ErrorCode::kManifestInvalid, "bug '" + bug.bug_id + "': " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kManifestInvalid, "bug '" + bug.bug_id + "': " + e.what());
  }
}

}  // namespace mutrealism
