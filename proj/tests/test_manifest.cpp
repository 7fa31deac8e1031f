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

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "mutrealism/error.hpp"
#include "mutrealism/manifest.hpp"
#include "support.hpp"

namespace mutrealism {
namespace {

const std::filesystem::path kData = MUTREALISM_TEST_DATA;

Json blobs_source() {
  return Json{{"generator", "blobs"}, {"classes", 3}, {"per_class", 30},
              {"dim", 3},             {"separation", 4.0}, {"seed", 1}};
}

Json minimal() {
  return Json{{"schema_version", 1},
              {"name", "t"},
              {"master_seed", 3},
              {"bugs", Json::array({Json{{"bug_id", "b"},
                                         {"dataset", blobs_source()},
                                         {"fault", {{"kind", "label_noise"},
                                                    {"params", {{"rate", 0.2}}}}}}})},
              {"pre_operators", Json::array({Json{{"id", "TCL"}}})}};
}

/// Error code of a failed parse; empty when the document is accepted.
std::optional<ErrorCode> parse_code(const Json& j) {
  try {
    parse_manifest(j, kData);
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

TEST(Manifest, Defaults) {
  auto m = parse_manifest(minimal(), kData);
  EXPECT_EQ(m.name, "t");
  EXPECT_EQ(m.n_instances, 5u);
  EXPECT_EQ(m.jobs, 1u);
  EXPECT_EQ(m.output_dir, (kData / "out").lexically_normal());
  EXPECT_TRUE(m.cache_enabled);
  EXPECT_TRUE(m.filter_trivial_pre);
  EXPECT_EQ(m.oracle.mode, OracleMode::kAuto);
  EXPECT_DOUBLE_EQ(m.oracle.epsilon, 1e-6);
  EXPECT_EQ(m.tie_rule.post_tie_winner, Scenario::kPostS2);
  ASSERT_EQ(m.bugs.size(), 1u);
  EXPECT_EQ(m.bugs[0].train_spec, default_train_spec_json());
  ASSERT_TRUE(m.bugs[0].fault.has_value());
  EXPECT_EQ(m.bugs[0].fault->seed, derive_seed(3, "fault/b"));
  ASSERT_EQ(m.pre_operators.size(), 1u);
  EXPECT_EQ(m.pre_operators[0].grid, default_grid(PreOperator::kTCL));
  EXPECT_EQ(m.hash.size(), 16u);
}

TEST(Manifest, ScenarioDefaultsAndOverrides) {
  auto j = minimal();
  j["post_operators"] = {"GF", "WS"};
  j["scenario1"] = Json::object();
  j["scenario2"] = Json::object();
  j["tie_rule"] = {{"post_tie_winner", "post_s1"}};
  j["defaults"] = {{"train_spec", {{"epochs", 7}}}};
  j["bugs"][0]["train_spec"] = {{"learning_rate", 0.5}};
  auto m = parse_manifest(j, kData);
  ASSERT_TRUE(m.scenario1 && m.scenario2);
  EXPECT_EQ(m.scenario1->repetitions, 5u);
  EXPECT_DOUBLE_EQ(m.scenario1->default_ratio, 0.01);
  EXPECT_EQ(m.scenario2->ratios, (std::vector<double>{0.01, 0.1, 0.2, 0.6, 1.0}));
  EXPECT_EQ(m.tie_rule.post_tie_winner, Scenario::kPostS1);
  EXPECT_EQ(m.bugs[0].train_spec["epochs"], 7);
  EXPECT_EQ(m.bugs[0].train_spec["learning_rate"], 0.5);
  EXPECT_EQ(m.bugs[0].train_spec["optimizer"], "adam");
}

TEST(Manifest, RejectsInvalidDocuments) {
  auto mutate = [](auto f) {
    auto j = minimal();
    f(j);
    return parse_code(j);
  };
  EXPECT_EQ(parse_code(minimal()), std::nullopt);
  EXPECT_EQ(mutate([](Json& j) { j["schema_version"] = 2; }), ErrorCode::kManifestInvalid);
  EXPECT_EQ(mutate([](Json& j) { j["n_instances"] = 0; }), ErrorCode::kManifestInvalid);
  EXPECT_EQ(mutate([](Json& j) { j["bugs"] = Json::array(); }), ErrorCode::kManifestInvalid);
  EXPECT_EQ(mutate([](Json& j) { j["bugs"].push_back(j["bugs"][0]); }), ErrorCode::kManifestInvalid);
  EXPECT_EQ(mutate([](Json& j) { j["bugs"][0].erase("fault"); }), ErrorCode::kManifestInvalid);
  EXPECT_EQ(mutate([](Json& j) { j["bugs"][0]["fault"]["kind"] = "gremlins"; }),
            ErrorCode::kManifestInvalid);
  EXPECT_EQ(mutate([](Json& j) { j["pre_operators"] = {{{"id", "XYZ"}}}; }),
            ErrorCode::kManifestInvalid);
  EXPECT_EQ(mutate([](Json& j) { j["pre_operators"] = {{{"id", "TDL"}, {"grid", {1.0}}}}; }),
            ErrorCode::kManifestInvalid);
  EXPECT_EQ(mutate([](Json& j) { j.erase("pre_operators"); }), ErrorCode::kManifestInvalid);
  EXPECT_EQ(mutate([](Json& j) { j["post_operators"] = {"GF"}; }), ErrorCode::kManifestInvalid);
  EXPECT_EQ(mutate([](Json& j) { j["scenario2"] = {{"ratios", {1.5}}}; }),
            ErrorCode::kManifestInvalid);
  EXPECT_EQ(mutate([](Json& j) { j["oracle"] = {{"mode", "vibes"}}; }),
            ErrorCode::kManifestInvalid);
  EXPECT_EQ(mutate([](Json& j) { j["tie_rule"] = {{"post_tie_winner", "pre"}}; }),
            ErrorCode::kManifestInvalid);
  EXPECT_EQ(mutate([](Json& j) { j["bugs"][0]["dataset"] = {{"generator", "spirals"}}; }),
            ErrorCode::kManifestInvalid);
  EXPECT_EQ(mutate([](Json& j) {
              j["bugs"][0]["dataset"] = {{"path", "missing.csv"}, {"label_column", "y"}};
            }),
            ErrorCode::kManifestInvalid);
}

TEST(Manifest, LoadFromFile) {
  testing::TempDir dir;
  auto path = dir.path() / "m.json";
  std::ofstream(path) << minimal().dump();
  auto m = load_manifest(path);
  EXPECT_EQ(m.base_dir, dir.path());
  EXPECT_EQ(m.output_dir, dir.path() / "out");

  std::ofstream(dir.path() / "broken.json") << "{";
  try {
    load_manifest(dir.path() / "broken.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kManifestInvalid);
  }
  EXPECT_THROW(load_manifest(dir.path() / "absent.json"), Error);
}

TEST(Manifest, CacheDirEnvironmentOverride) {
  auto j = minimal();
  j["cache"] = {{"dir", "c"}};
  EXPECT_EQ(parse_manifest(j, kData).cache_dir, (kData / "c").lexically_normal());
  ::setenv(kCacheDirEnv, "/tmp/mutrealism-env-cache", 1);
  auto m = parse_manifest(j, kData);
  ::unsetenv(kCacheDirEnv);
  EXPECT_EQ(m.cache_dir, std::filesystem::path("/tmp/mutrealism-env-cache"));
}

TEST(Manifest, HashTracksContent) {
  auto a = parse_manifest(minimal(), kData);
  auto j = minimal();
  j["master_seed"] = 4;
  EXPECT_NE(a.hash, parse_manifest(j, kData).hash);
  EXPECT_EQ(a.hash, parse_manifest(minimal(), kData).hash);
}

TEST(Manifest, BuildsReferenceFault) {
  auto m = parse_manifest(minimal(), kData);
  auto bug = build_bug(m.bugs[0], m);
  EXPECT_EQ(bug.bug_id, "b");
  EXPECT_EQ(bug.origin, FaultOrigin::kDataFault);
  EXPECT_EQ(bug.fixed.data.test, bug.faulty.data.test);
  EXPECT_EQ(diff_jobs(bug.fixed, bug.faulty), (std::vector<std::string>{"train_labels"}));
  EXPECT_EQ(bug.fixed.spec.architecture.layers.size(), 3u);
}

Json pets_source(const std::string& file) {
  return Json{{"path", file},
              {"label_column", "species"},
              {"categorical_columns", {"color"}},
              {"test_fraction", 0.2}};
}

TEST(Manifest, ExplicitFaultyDataset) {
  auto j = minimal();
  j["defaults"] = {{"train_spec", {{"batch_size", 4}}}};
  j["bugs"][0] = {{"bug_id", "pets"},
                  {"dataset", pets_source("pets.csv")},
                  {"faulty", {{"dataset", pets_source("pets_faulty.csv")}}}};
  auto m = parse_manifest(j, kData);
  auto bug = build_bug(m.bugs[0], m);
  EXPECT_EQ(bug.origin, FaultOrigin::kDataFault);
  EXPECT_EQ(bug.fixed.data.test, bug.faulty.data.test);
  EXPECT_EQ(bug.fixed.data.train->features, bug.faulty.data.train->features);
  EXPECT_NE(bug.fixed.data.train->labels, bug.faulty.data.train->labels);
}

TEST(Manifest, ExplicitFaultyTrainSpec) {
  auto j = minimal();
  j["bugs"][0].erase("fault");
  j["bugs"][0]["faulty"] = {{"train_spec", {{"learning_rate", 1.0}}}};
  auto m = parse_manifest(j, kData);
  auto bug = build_bug(m.bugs[0], m);
  EXPECT_EQ(bug.origin, FaultOrigin::kProgramFault);
  EXPECT_EQ(diff_jobs(bug.fixed, bug.faulty), (std::vector<std::string>{"learning_rate"}));
}

TEST(Manifest, ExplicitFaultyNeedsExactlyOneDifference) {
  auto j = minimal();
  j["bugs"][0].erase("fault");
  j["bugs"][0]["faulty"] = Json::object();
  EXPECT_EQ(parse_code(j), ErrorCode::kManifestInvalid);
  j["bugs"][0]["faulty"] = {{"train_spec", {{"learning_rate", 1.0}}},
                            {"dataset", blobs_source()}};
  EXPECT_EQ(parse_code(j), ErrorCode::kManifestInvalid);
}

TEST(Manifest, MismatchedFaultyDatasetFailsToBuild) {
  testing::TempDir dir;
  std::ofstream(dir.path() / "short.csv") << "weight,height,color,species\n1,2,black,cat\n3,4,white,dog\n";
  std::filesystem::copy_file(kData / "pets.csv", dir.path() / "pets.csv");
  auto j = minimal();
  j["bugs"][0] = {{"bug_id", "pets"},
                  {"dataset", pets_source("pets.csv")},
                  {"faulty", {{"dataset", pets_source("short.csv")}}}};
  auto m = parse_manifest(j, dir.path());
  try {
    build_bug(m.bugs[0], m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kManifestInvalid);
  }
}

TEST(Manifest, ResolveTrainSpec) {
  auto data = testing::small_blobs();
  auto spec = resolve_train_spec(default_train_spec_json(), data);
  ASSERT_EQ(spec.architecture.layers.size(), 3u);
  EXPECT_EQ(spec.architecture.input_dim(), data.feature_dim());
  EXPECT_EQ(spec.architecture.output_dim(), data.class_count);
  EXPECT_EQ(spec.epochs, 30u);
  EXPECT_EQ(spec.batch_size, 16u);
  auto bad = default_train_spec_json();
  bad["optimizer"] = "rmsprop";
  EXPECT_THROW(resolve_train_spec(bad, data), Error);
}

}  // namespace
}  // namespace mutrealism
