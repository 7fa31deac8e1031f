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

#include <cmath>
#include <filesystem>
#include <string>

#include "mutrealism/mutrealism.h"
#include "support.hpp"

namespace {

using mutrealism::testing::TempDir;

const std::filesystem::path kData = MUTREALISM_TEST_DATA;

struct Handles {
  mr_context* ctx = nullptr;
  mr_manifest* manifest = nullptr;
  mr_report* report = nullptr;
  ~Handles() {
    mr_report_destroy(report);
    mr_manifest_destroy(manifest);
    mr_context_destroy(ctx);
  }
};

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STRNE(mr_version(), "");
  EXPECT_STREQ(mr_status_name(MR_OK), "ok");
  EXPECT_STREQ(mr_status_name(MR_SCREENING_BLOCK), "screening block");
  EXPECT_STREQ(mr_status_name(static_cast<mr_status>(999)), "unknown");
}

TEST(CApi, NullArgumentsAreRejected) {
  EXPECT_EQ(mr_context_create(nullptr), MR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(mr_last_error()), "");
  EXPECT_EQ(mr_manifest_load(nullptr, nullptr), MR_INVALID_ARGUMENT);
  EXPECT_EQ(mr_run(nullptr, nullptr, nullptr), MR_INVALID_ARGUMENT);
  mr_context_destroy(nullptr);
  mr_manifest_destroy(nullptr);
  mr_report_destroy(nullptr);
}

TEST(CApi, ContextSetters) {
  Handles h;
  ASSERT_EQ(mr_context_create(&h.ctx), MR_OK);
  EXPECT_EQ(mr_context_set_jobs(h.ctx, 2), MR_OK);
  EXPECT_EQ(mr_context_set_jobs(h.ctx, 0), MR_INVALID_ARGUMENT);
  EXPECT_EQ(mr_context_set_oracle_mode(h.ctx, "loss"), MR_OK);
  EXPECT_EQ(mr_context_set_oracle_mode(h.ctx, "vibes"), MR_INVALID_ARGUMENT);
  EXPECT_EQ(mr_context_set_cache_enabled(h.ctx, 0), MR_OK);
  EXPECT_EQ(mr_context_set_cache_dir(h.ctx, "/tmp/x"), MR_OK);
  EXPECT_EQ(mr_context_set_override_screening(h.ctx, 1), MR_OK);
}

TEST(CApi, ManifestErrors) {
  mr_manifest* m = nullptr;
  EXPECT_EQ(mr_manifest_parse("{", ".", &m), MR_MANIFEST_INVALID);
  EXPECT_EQ(m, nullptr);
  EXPECT_EQ(mr_manifest_parse("{\"schema_version\": 1}", ".", &m), MR_MANIFEST_INVALID);
  EXPECT_NE(std::string(mr_last_error()).find("bugs"), std::string::npos);
  EXPECT_EQ(mr_manifest_load("/nonexistent/manifest.json", &m), MR_MANIFEST_INVALID);

  auto j = mutrealism::testing::tiny_manifest();
  j["bugs"][0]["dataset"] = {{"path", "absent.csv"}, {"label_column", "y"}};
  EXPECT_EQ(mr_manifest_parse(j.dump().c_str(), kData.c_str(), &m), MR_MANIFEST_INVALID);
}

TEST(CApi, RunWriteAndReload) {
  TempDir dir;
  Handles h;
  ASSERT_EQ(mr_context_create(&h.ctx), MR_OK);
  mr_context_set_cache_dir(h.ctx, (dir.path() / "cache").c_str());
  auto text = mutrealism::testing::tiny_manifest().dump();
  ASSERT_EQ(mr_manifest_parse(text.c_str(), dir.path().c_str(), &h.manifest), MR_OK);
  EXPECT_EQ(mr_manifest_bug_count(h.manifest), 2u);
  EXPECT_EQ(std::string(mr_manifest_hash(h.manifest)).size(), 16u);
  EXPECT_EQ(std::filesystem::path(mr_manifest_output_dir(h.manifest)), dir.path() / "out");
  EXPECT_EQ(mr_manifest_validate(h.manifest), MR_OK);

  ASSERT_EQ(mr_run(h.ctx, h.manifest, &h.report), MR_OK) << mr_last_error();
  EXPECT_GT(mr_report_row_count(h.report), 0u);
  EXPECT_GT(mr_report_trainings_executed(h.report), 0u);
  const size_t cold_total = mr_report_trainings_executed(h.report) + mr_report_cache_hits(h.report);
  const std::string csv = mr_report_metrics_csv(h.report);
  EXPECT_EQ(csv.rfind("bug_id,mutant_id,", 0), 0u);
  EXPECT_NE(std::string(mr_report_summary(h.report)).find("noise"), std::string::npos);

  auto out = dir.path() / "out";
  ASSERT_EQ(mr_report_write(h.report, out.c_str()), MR_OK);
  ASSERT_EQ(mr_report_emit_plots(h.report, out.c_str()), MR_OK);
  EXPECT_TRUE(std::filesystem::exists(out / "plots" / "winners_cs.csv"));

  mr_report* loaded = nullptr;
  ASSERT_EQ(mr_report_load((out / "report.json").c_str(), &loaded), MR_OK);
  EXPECT_EQ(std::string(mr_report_metrics_csv(loaded)), csv);
  EXPECT_EQ(mr_report_row_count(loaded), mr_report_row_count(h.report));
  mr_report_destroy(loaded);

  mr_report* warm = nullptr;
  ASSERT_EQ(mr_run(h.ctx, h.manifest, &warm), MR_OK);
  EXPECT_EQ(mr_report_trainings_executed(warm), 0u);
  EXPECT_EQ(mr_report_cache_hits(warm), cold_total);
  EXPECT_EQ(std::string(mr_report_metrics_csv(warm)), csv);
  mr_report_destroy(warm);

  EXPECT_EQ(mr_clean_cache(h.ctx, h.manifest), MR_OK);
  EXPECT_FALSE(std::filesystem::exists(dir.path() / "cache"));
  EXPECT_EQ(mr_report_load((dir.path() / "missing.json").c_str(), &loaded), MR_IO);
}

TEST(CApi, ScreeningBlockStatus) {
  TempDir dir;
  Handles h;
  ASSERT_EQ(mr_context_create(&h.ctx), MR_OK);
  mr_context_set_cache_enabled(h.ctx, 0);
  auto text = mutrealism::testing::blocking_manifest((kData / "skewed.csv").string()).dump();
  ASSERT_EQ(mr_manifest_parse(text.c_str(), dir.path().c_str(), &h.manifest), MR_OK);
  EXPECT_EQ(mr_run(h.ctx, h.manifest, &h.report), MR_SCREENING_BLOCK);
  EXPECT_EQ(h.report, nullptr);
  EXPECT_NE(std::string(mr_last_error()).find("flat"), std::string::npos);
}

TEST(CApi, Metrics) {
  // Two tests, three instances.
  const uint8_t cells[] = {1, 0, 1, 0, 0, 0};
  double kp[2];
  ASSERT_EQ(mr_killing_probability(cells, 2, 3, kp), MR_OK);
  EXPECT_DOUBLE_EQ(kp[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(kp[1], 0.0);
  const uint8_t bad[] = {2};
  EXPECT_EQ(mr_killing_probability(bad, 1, 1, kp), MR_INVALID_ARGUMENT);
  EXPECT_EQ(mr_killing_probability(cells, 2, 0, kp), MR_INVALID_ARGUMENT);

  const double m[] = {0.6, 0.2, 0.0};
  const double f[] = {0.4, 0.4, 0.2};
  double v = -1;
  int defined = -1;
  ASSERT_EQ(mr_coupling_strength(m, f, 3, &v, &defined), MR_OK);
  EXPECT_EQ(defined, 1);
  EXPECT_NEAR(v, 0.6 / 0.8, 1e-12);
  ASSERT_EQ(mr_behavioral_similarity(m, f, 3, &v, &defined), MR_OK);
  EXPECT_NEAR(v, 0.6 / 1.2, 1e-12);

  const double zero[] = {0.0, 0.0};
  ASSERT_EQ(mr_coupling_strength(zero, f, 2, &v, &defined), MR_OK);
  EXPECT_EQ(defined, 0);
  EXPECT_EQ(v, 0.0);
  EXPECT_EQ(mr_coupling_strength(m, f, 3, nullptr, &defined), MR_INVALID_ARGUMENT);
}

}  // namespace
