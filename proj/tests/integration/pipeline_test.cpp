// Copyright 2026 The logit-refine Authors. All Rights Reserved.
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

#include "rld/checkpoint.hpp"
#include "rld/dataset.hpp"
#include "rld/train.hpp"

namespace rld {
namespace {

const Dataset& data() {
  static const Dataset d = generate_dataset(DatasetSpec{});
  return d;
}

TrainConfig student_config(std::uint64_t seed) {
  TrainConfig config;
  config.shuffle_seed = seed;
  return config;
}

MlpSpec student_spec(std::uint64_t seed) {
  return MlpSpec{{32, 16, 10}, Activation::kReLU, seed};
}

const Checkpoint& teacher() {
  static const Checkpoint t = train_teacher(
      data(), MlpSpec{{32, 128, 128, 10}, Activation::kReLU, 1}, student_config(1));
  return t;
}

TrainResult distill(const DistillSpec& spec, std::uint64_t seed, bool cache = false) {
  TrainConfig config = student_config(seed);
  config.cache_teacher_logits = cache;
  return distill_student(data(), teacher(), student_spec(seed), config, spec);
}

TEST(Pipeline, DistillationIsDeterministic) {
  const TrainResult a = distill(DistillSpec::defaults_for(Method::kRLD), 3);
  const TrainResult b = distill(DistillSpec::defaults_for(Method::kRLD), 3);
  EXPECT_EQ(encode_checkpoint(a.checkpoint), encode_checkpoint(b.checkpoint));
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t e = 0; e < a.history.size(); ++e) {
    EXPECT_EQ(a.history[e].mean_loss.total, b.history[e].mean_loss.total);
    EXPECT_EQ(a.history[e].val_top1, b.history[e].val_top1);
  }
  const TrainResult c = distill(DistillSpec::defaults_for(Method::kRLD), 4);
  EXPECT_NE(encode_checkpoint(a.checkpoint), encode_checkpoint(c.checkpoint));
}

TEST(Pipeline, CeOnlyStudentEqualsSupervisedTraining) {
  const TrainResult distilled = distill(DistillSpec::defaults_for(Method::kCeOnly), 2);
  const TrainResult plain = train_supervised(data(), student_spec(2), student_config(2));
  EXPECT_EQ(distilled.checkpoint.model, plain.checkpoint.model);
}

TEST(Pipeline, RldMatchesDkdWhenTheTeacherIsAlwaysRight) {
  ASSERT_EQ(evaluate(teacher().model, data().train).top1, 1.0);
  DistillSpec rld = DistillSpec::defaults_for(Method::kRLD);
  DistillSpec dkd = rld;
  dkd.method = Method::kDKD;
  const TrainResult a = distill(rld, 0);
  const TrainResult b = distill(dkd, 0);
  EXPECT_EQ(a.checkpoint.model, b.checkpoint.model);
  for (const EpochMetrics& m : a.history) EXPECT_EQ(m.empty_complement, 0u);
}

TEST(Pipeline, TeacherLogitCacheIsBitIdentical) {
  for (Method m : {Method::kRLD, Method::kLR}) {
    const TrainResult fresh = distill(DistillSpec::defaults_for(m), 1, false);
    const TrainResult cached = distill(DistillSpec::defaults_for(m), 1, true);
    EXPECT_EQ(fresh.checkpoint.model, cached.checkpoint.model) << to_string(m);
  }
}

TEST(Pipeline, EveryMethodTrainsWithFiniteLosses) {
  for (Method m : {Method::kKD, Method::kDKD, Method::kLA, Method::kRC, Method::kLR}) {
    const TrainResult r = distill(DistillSpec::defaults_for(m), 0);
    ASSERT_EQ(r.history.size(), 60u);
    for (const EpochMetrics& e : r.history) {
      EXPECT_TRUE(std::isfinite(e.mean_loss.total)) << to_string(m) << " epoch " << e.epoch;
    }
    EXPECT_EQ(r.checkpoint.metadata.at("method"), to_string(m));
    EXPECT_GT(r.history.back().val_top1, 0.1) << to_string(m);
  }
}

}  // namespace
}  // namespace rld
