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

#include "rld/refine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rld/error.hpp"

namespace rld {

std::string_view to_string(MaskStrategy s) {
  return s == MaskStrategy::kGE ? "GE" : "G";
}

MaskStrategy parse_mask_strategy(std::string_view text) {
  if (text == "GE" || text == "ge") return MaskStrategy::kGE;
  if (text == "G" || text == "g") return MaskStrategy::kG;
  throw Error(ErrorCode::kConfigError,
              "unknown mask strategy '" + std::string(text) + "' (expected GE or G)");
}

bool MaskSet::contains(ClassIndex c) const {
  return std::binary_search(masked.begin(), masked.end(), c);
}

MaskSet MaskSet::single(ClassIndex c, std::size_t num_classes) {
  check_label(c, num_classes);
  MaskSet m;
  m.masked = {c};
  m.complement.reserve(num_classes - 1);
  for (ClassIndex i = 0; i < num_classes; ++i) {
    if (i != c) m.complement.push_back(i);
  }
  m.strategy = MaskStrategy::kGE;
  m.true_class = c;
  m.num_classes = num_classes;
  return m;
}

MaskSet compute_mask(const LogitVector& teacher, ClassIndex label,
                     MaskStrategy strategy) {
  check_label(label, teacher.size());
  MaskSet m;
  m.strategy = strategy;
  m.true_class = label;
  m.num_classes = teacher.size();
  const double pivot = teacher[label];
  for (ClassIndex i = 0; i < teacher.size(); ++i) {
    const bool hit = strategy == MaskStrategy::kGE ? teacher[i] >= pivot
                                                   : teacher[i] > pivot;
    (hit ? m.masked : m.complement).push_back(i);
  }
  return m;
}

ConfidencePair confidence_at(const LogitVector& z, ClassIndex k, Temperature tau) {
  check_label(k, z.size());
  ClassSet others;
  others.reserve(z.size() - 1);
  for (ClassIndex i = 0; i < z.size(); ++i) {
    if (i != k) others.push_back(i);
  }
  const double log_norm = log_sum_exp(z, tau, full_support(z.size()));
  ConfidencePair b;
  b.log_head = z[k] / tau.value() - log_norm;
  b.log_rest = log_sum_exp(z, tau, others) - log_norm;
  b.head = std::exp(b.log_head);
  b.rest = std::exp(b.log_rest);
  return b;
}

ConfidencePair teacher_confidence(const LogitVector& teacher, Temperature tau) {
  return confidence_at(teacher, argmax(teacher.values()), tau);
}

ConfidencePair student_confidence(const LogitVector& student, ClassIndex label,
                                  Temperature tau) {
  return confidence_at(student, label, tau);
}

std::optional<ProbVector> masked_correlation(const LogitVector& logits,
                                             const MaskSet& mask,
                                             Temperature tau) {
  if (mask.num_classes != logits.size()) {
    throw Error(ErrorCode::kShapeError, "mask and logits disagree on class count");
  }
  if (mask.complement.empty()) return std::nullopt;
  if (mask.complement.size() == 1) return ProbVector({1.0}, mask.complement);
  return softmax(logits, tau, mask.complement);
}

}  // namespace rld
