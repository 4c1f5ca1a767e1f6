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

#include "rld/refine.hpp"
#include "test_support.hpp"

namespace rld {
namespace {

TEST(Mask, CorrectTeacherMasksOnlyTheLabel) {
  const MaskSet m = compute_mask(LogitVector({3, 1, 0}), 0, MaskStrategy::kGE);
  EXPECT_EQ(m.masked, (ClassSet{0}));
  EXPECT_EQ(m.complement, (ClassSet{1, 2}));
}

TEST(Mask, WrongTeacherMasksEveryClassAtOrAboveTheLabel) {
  const MaskSet m = compute_mask(LogitVector({2.0, 1.0, 3.0, 0.5}), 0, MaskStrategy::kGE);
  EXPECT_EQ(m.masked, (ClassSet{0, 2}));
  EXPECT_EQ(m.complement, (ClassSet{1, 3}));
}

TEST(Mask, LabelRankedLastLeavesAnEmptyComplement) {
  const MaskSet m = compute_mask(LogitVector({1, 3, 2, 1}), 3, MaskStrategy::kGE);
  EXPECT_EQ(m.masked, (ClassSet{0, 1, 2, 3}));
  EXPECT_TRUE(m.complement.empty());
}

TEST(Mask, StrictStrategyLeavesTiesUnmasked) {
  const LogitVector z({1, 3, 2, 1});
  const MaskSet g = compute_mask(z, 3, MaskStrategy::kG);
  EXPECT_EQ(g.masked, (ClassSet{1, 2}));
  EXPECT_EQ(g.complement, (ClassSet{0, 3}));
}

TEST(Mask, SingleMaskAndLabelChecks) {
  const MaskSet s = MaskSet::single(2, 4);
  EXPECT_EQ(s.masked, (ClassSet{2}));
  EXPECT_EQ(s.complement, (ClassSet{0, 1, 3}));
  EXPECT_RLD_ERROR(compute_mask(LogitVector({1, 2}), 5, MaskStrategy::kGE),
                   ErrorCode::kInvalidLabel);
}

TEST(MaskStrategy, ParsesBothSpellings) {
  EXPECT_EQ(parse_mask_strategy("GE"), MaskStrategy::kGE);
  EXPECT_EQ(parse_mask_strategy("g"), MaskStrategy::kG);
  EXPECT_EQ(to_string(MaskStrategy::kG), "G");
  EXPECT_RLD_ERROR(parse_mask_strategy("top-k"), ErrorCode::kConfigError);
}

TEST(Confidence, TeacherHeadIsTheMaximumProbability) {
  const ConfidencePair u = teacher_confidence(LogitVector({0, 0, 0, 0}), Temperature(1.0));
  EXPECT_DOUBLE_EQ(u.head, 0.25);
  EXPECT_DOUBLE_EQ(u.rest, 0.75);
  const ConfidencePair c = teacher_confidence(LogitVector({2, 1, 0}), Temperature(1.0));
  EXPECT_NEAR(c.head, 0.66524095577482188953, 1e-15);
  EXPECT_NEAR(c.head + c.rest, 1.0, 1e-15);
}

TEST(Confidence, HighTemperatureFlattensTowardsUniform) {
  const ConfidencePair c = teacher_confidence(LogitVector({2, 1, 0}), Temperature(100.0));
  EXPECT_GT(c.head, 1.0 / 3.0);
  EXPECT_LT(c.head - 1.0 / 3.0, 4e-3);
}

TEST(Confidence, StudentHeadUsesTheLabel) {
  const ConfidencePair u = student_confidence(LogitVector({0, 0, 0, 0}), 1, Temperature(1.0));
  EXPECT_DOUBLE_EQ(u.head, 0.25);
  EXPECT_NEAR(student_confidence(LogitVector({1, 2, 3}), 0, Temperature(1.0)).head,
              0.090030573170380457998, 1e-15);
  EXPECT_NEAR(student_confidence(LogitVector({5, 0}), 0, Temperature(1.0)).head,
              0.99330714907571514444, 1e-15);
}

TEST(Confidence, LogPartsAreConsistent) {
  const ConfidencePair c = confidence_at(LogitVector({0.3, -2.0, 4.0}), 1, Temperature(2.0));
  EXPECT_NEAR(std::exp(c.log_head), c.head, 1e-15);
  EXPECT_NEAR(std::exp(c.log_rest), c.rest, 1e-15);
}

TEST(MaskedCorrelation, RenormalisesOverTheComplement) {
  const LogitVector z({2.0, 1.0, 3.0, 0.5});
  const MaskSet m = compute_mask(z, 0, MaskStrategy::kGE);
  const auto p = masked_correlation(z, m, Temperature(1.0));
  ASSERT_TRUE(p.has_value());
  EXPECT_NEAR((*p)[0], 0.62245933120185456464, 1e-15);
  EXPECT_NEAR((*p)[1], 0.37754066879814543536, 1e-15);
  EXPECT_EQ(p->probability_of(2), 0.0);
}

TEST(MaskedCorrelation, SingleClassComplementIsOne) {
  const LogitVector z({3, 1, 2});
  const auto p = masked_correlation(z, compute_mask(z, 2, MaskStrategy::kGE), Temperature(1.0));
  ASSERT_TRUE(p.has_value());
  ASSERT_EQ(p->size(), 1u);
  EXPECT_EQ((*p)[0], 1.0);
  EXPECT_EQ(p->support()[0], 1u);
}

TEST(MaskedCorrelation, EmptyComplementIsSignalled) {
  const LogitVector z({1, 3, 2, 1});
  EXPECT_FALSE(masked_correlation(z, compute_mask(z, 3, MaskStrategy::kGE), Temperature(1.0))
                   .has_value());
}

}  // namespace
}  // namespace rld
