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

#include <map>

#include "mutrealism/error.hpp"
#include "mutrealism/pre_mutation.hpp"
#include "support.hpp"

namespace mutrealism {
namespace {

TrainingJob fixed_job() {
  BlobSpec s;
  s.classes = 2;
  s.per_class = 31;  // 25 train + 6 test rows per class
  s.dim = 3;
  s.test_fraction = 0.2;
  TrainingJob job;
  job.data = gen_blobs(s);
  job.spec = testing::small_spec(job.data, {6, 6});
  return job;
}

PreOperatorConfig config(PreOperator op) { return {op, default_grid(op)}; }

TEST(PreOperators, NamesRoundTrip) {
  for (const char* n : {"TCL", "TRD", "TAN", "TUD", "HLR", "HNE", "HBS", "ACH", "ARM", "LCH",
                        "WCI", "OCH"}) {
    EXPECT_EQ(to_string(parse_pre_operator(n)), n);
  }
  EXPECT_THROW(parse_pre_operator("XYZ"), Error);
}

TEST(PreOperators, DefaultGrids) {
  std::vector<ParamValue> rates{0.1, 0.3, 0.5};
  EXPECT_EQ(default_grid(PreOperator::kTCL), rates);
  EXPECT_EQ(default_grid(PreOperator::kTRD), rates);
  EXPECT_EQ(default_grid(PreOperator::kTAN), rates);
  EXPECT_EQ(default_grid(PreOperator::kTUD), rates);
  EXPECT_EQ(default_grid(PreOperator::kHLR), (std::vector<ParamValue>{0.01, 0.1, 10.0, 100.0}));
  EXPECT_EQ(default_grid(PreOperator::kHNE), (std::vector<ParamValue>{0.1, 0.5}));
}

TEST(ApplyPre, LabelErrorFlipsExactCount) {
  auto job = fixed_job();
  ASSERT_EQ(job.data.train->size(), 50u);
  auto c = apply_pre_operator(config(PreOperator::kTCL), 0.1, job, "b", 3);
  ASSERT_TRUE(c.applicable());
  std::size_t changed = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    changed += c.job->data.train->labels[i] != job.data.train->labels[i];
  }
  EXPECT_EQ(changed, 5u);
  EXPECT_EQ(c.job->data.test.get(), job.data.test.get());
  EXPECT_EQ(c.descriptor.id(), "pre/TCL/0.1");
  EXPECT_EQ(c.descriptor.bug_id, "b");
}

TEST(ApplyPre, LearningRateFactor) {
  auto job = fixed_job();
  job.spec.learning_rate = 0.1;
  auto c = apply_pre_operator(config(PreOperator::kHLR), 0.01, job, "b", 3);
  ASSERT_TRUE(c.applicable());
  EXPECT_DOUBLE_EQ(c.job->spec.learning_rate, 0.001);
}

TEST(ApplyPre, RemovalRateOneRejected) {
  auto job = fixed_job();
  PreOperatorConfig cfg{PreOperator::kTRD, {0.5, 1.0}};
  try {
    apply_pre_operator(cfg, 1.0, job, "b", 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  EXPECT_THROW(validate_pre_param(PreOperator::kTRD, 1.0), Error);
  EXPECT_THROW(validate_pre_param(PreOperator::kTCL, 0.0), Error);
  EXPECT_THROW(validate_pre_param(PreOperator::kACH, 0.5), Error);
  EXPECT_THROW(validate_pre_param(PreOperator::kOCH, std::string("rmsprop")), Error);
}

TEST(ApplyPre, ParameterMustBelongToGrid) {
  auto job = fixed_job();
  EXPECT_THROW(apply_pre_operator(config(PreOperator::kTCL), 0.2, job, "b", 1), Error);
}

TEST(ApplyPre, RemovalCounts) {
  auto job = fixed_job();
  auto trd = apply_pre_operator(config(PreOperator::kTRD), 0.3, job, "b", 1);
  EXPECT_EQ(trd.job->data.train->size(), 35u);
  auto tud = apply_pre_operator(config(PreOperator::kTUD), 0.5, job, "b", 1);
  auto counts = class_counts(*tud.job->data.train, 2);
  EXPECT_EQ(counts[0] + counts[1], 50u - 13u);  // round(0.5 * 25) from the minority
}

TEST(ApplyPre, EveryOperatorTouchesExactlyOneAspect) {
  auto job = fixed_job();
  const std::map<PreOperator, std::string> prefix{
      {PreOperator::kTCL, "train_labels"}, {PreOperator::kTRD, "train_rows"},
      {PreOperator::kTAN, "train_features"}, {PreOperator::kTUD, "train_rows"},
      {PreOperator::kHLR, "learning_rate"}, {PreOperator::kHNE, "epochs"},
      {PreOperator::kHBS, "batch_size"},   {PreOperator::kACH, "activation[0]"},
      {PreOperator::kARM, "activation["},  {PreOperator::kLCH, "loss"},
      {PreOperator::kWCI, "weight_init"},  {PreOperator::kOCH, "optimizer"}};
  std::size_t applied = 0;
  for (const auto& [op, aspect] : prefix) {
    for (const auto& param : default_grid(op)) {
      auto c = apply_pre_operator(config(op), param, job, "b", 7);
      if (!c.applicable()) {
        EXPECT_FALSE(c.skip_reason.empty());
        continue;
      }
      ++applied;
      auto diff = diff_jobs(job, *c.job);
      ASSERT_EQ(diff.size(), 1u) << c.descriptor.id();
      EXPECT_EQ(diff[0].rfind(aspect, 0), 0u) << c.descriptor.id() << " -> " << diff[0];
      EXPECT_EQ(c.job->data.test.get(), job.data.test.get());
    }
  }
  EXPECT_GT(applied, 25u);
}

TEST(ApplyPre, InapplicableOperatorsSkipWithReason) {
  auto job = fixed_job();
  job.spec = testing::small_spec(job.data, {});  // no hidden layer
  auto arm = apply_pre_operator(config(PreOperator::kARM), 0.0, job, "b", 1);
  EXPECT_FALSE(arm.applicable());
  EXPECT_FALSE(arm.skip_reason.empty());
  auto ach = apply_pre_operator(config(PreOperator::kACH), std::string("tanh"), job, "b", 1);
  EXPECT_FALSE(ach.applicable());
  auto och = apply_pre_operator(config(PreOperator::kOCH), std::string("adam"), job, "b", 1);
  EXPECT_FALSE(och.applicable());
}

TEST(Enumerate, CrossProductCount) {
  auto job = fixed_job();
  std::vector<PreOperatorConfig> cfgs{{PreOperator::kTCL, {0.1, 0.3}},
                                      {PreOperator::kHLR, {0.1, 10.0, 100.0}},
                                      {PreOperator::kWCI, {std::string("he_uniform")}}};
  auto a = enumerate_pre_mutants(cfgs, job, "b", 9);
  ASSERT_EQ(a.size(), 6u);
  auto b = enumerate_pre_mutants(cfgs, job, "b", 9);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].descriptor.id(), b[i].descriptor.id());
    EXPECT_EQ(a[i].job->content_hash(), b[i].job->content_hash());
  }
  cfgs[0].grid.clear();
  EXPECT_EQ(enumerate_pre_mutants(cfgs, job, "b", 9).size(), 4u);
}

TEST(Enumerate, DifferentSeedsGiveDifferentDataEdits) {
  auto job = fixed_job();
  std::vector<PreOperatorConfig> cfgs{{PreOperator::kTCL, {0.3}}};
  auto a = enumerate_pre_mutants(cfgs, job, "b", 1);
  auto b = enumerate_pre_mutants(cfgs, job, "b", 2);
  EXPECT_NE(*a[0].job->data.train, *b[0].job->data.train);
}

TEST(TrivialFilter, MixedBatchPartition) {
  std::vector<KPVector> kps{{{0, 0}, 5}, {{0.2, 0}, 5}, {{0, 1.0}, 5}, {{0, 0}, 5}};
  auto r = filter_trivial_mutants(kps);
  EXPECT_EQ(r.kept.size() + r.discarded.size(), kps.size());
  EXPECT_EQ(r.discarded.size(), 2u);
}

}  // namespace
}  // namespace mutrealism
