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

#include "rld/checkpoint.hpp"
#include "rld/dataset.hpp"
#include "rld/metrics.hpp"
#include "rld/train.hpp"
#include "test_support.hpp"

namespace rld {
namespace {

// Validation top-1 of the reference teacher, recorded from the first run
// after the gradient suite passed.
constexpr double kTeacherValGolden = 0.595;
constexpr double kGoldenTolerance = 0.005;

const Dataset& reference_data() {
  static const Dataset data = generate_dataset(DatasetSpec{});
  return data;
}

const Checkpoint& reference_teacher() {
  static const Checkpoint teacher = [] {
    TrainConfig config;
    config.shuffle_seed = 1;
    return train_teacher(reference_data(), MlpSpec{{32, 128, 128, 10}, Activation::kReLU, 1},
                         config);
  }();
  return teacher;
}

TEST(ReferenceDataset, ShapeAndDifficultyBaseline) {
  const Dataset& data = reference_data();
  EXPECT_EQ(data.num_classes, 10u);
  EXPECT_EQ(data.dim, 32u);
  EXPECT_EQ(data.train.size(), 5000u);
  EXPECT_EQ(data.val.size(), 1000u);
  EXPECT_DOUBLE_EQ(nearest_mean_accuracy(DatasetSpec{}, data.val), 0.68);
}

TEST(ReferenceTeacher, ValidationTop1MatchesGolden) {
  const double top1 = evaluate(reference_teacher().model, reference_data().val).top1;
  EXPECT_NEAR(top1, kTeacherValGolden, kGoldenTolerance);
}

TEST(ReferenceTeacher, TrainProportionsAgreeWithEvaluate) {
  const Mlp& model = reference_teacher().model;
  const PredictionProportions p = prediction_proportions(model, reference_data().train);
  EXPECT_EQ(p.correct, evaluate(model, reference_data().train).top1);
  EXPECT_EQ(p.correct + p.incorrect, 1.0);
  EXPECT_EQ(p.samples, 5000u);
}

TEST(ReferenceTeacher, CheckpointRoundTrips) {
  const Checkpoint& teacher = reference_teacher();
  EXPECT_EQ(teacher.metadata.at("kind"), "teacher");
  const Checkpoint back = decode_checkpoint(encode_checkpoint(teacher), "memory");
  EXPECT_EQ(back, teacher);
  EXPECT_EQ(evaluate(back.model, reference_data().val).top1,
            evaluate(teacher.model, reference_data().val).top1);
}

}  // namespace
}  // namespace rld
