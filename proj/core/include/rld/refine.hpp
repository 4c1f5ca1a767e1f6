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

// Label-aware refinement of teacher logits: the dynamic class mask and the
// binary sample-confidence distributions.

#pragma once

#include <optional>
#include <string_view>

#include "rld/logit.hpp"

namespace rld {

/// GE masks every class whose teacher logit is >= the true-class logit
/// (so the true class itself is masked); G uses strict >.
enum class MaskStrategy { kGE, kG };

std::string_view to_string(MaskStrategy s);
MaskStrategy parse_mask_strategy(std::string_view text);

struct MaskSet {
  ClassSet masked;
  ClassSet complement;
  MaskStrategy strategy = MaskStrategy::kGE;
  ClassIndex true_class = 0;
  std::size_t num_classes = 0;

  bool contains(ClassIndex c) const;

  /// Mask of exactly {c}; the non-target split used by DKD.
  static MaskSet single(ClassIndex c, std::size_t num_classes);
};

/// Applies the strategy's inequality to raw (untempered) teacher logits.
MaskSet compute_mask(const LogitVector& teacher, ClassIndex label,
                     MaskStrategy strategy);

/// Binary distribution {head, rest}. The log fields are the primary values;
/// head/rest are their exponentials.
struct ConfidencePair {
  double head = 0.0;
  double rest = 0.0;
  double log_head = 0.0;
  double log_rest = 0.0;
};

/// {p_k, 1 - p_k} of softmax(z / tau), with the rest mass computed as its own
/// log-sum-exp rather than as 1 - p_k.
ConfidencePair confidence_at(const LogitVector& z, ClassIndex k, Temperature tau);

/// Head is the teacher's largest tempered probability.
ConfidencePair teacher_confidence(const LogitVector& teacher, Temperature tau);

/// Head is the student's tempered probability of the true class.
ConfidencePair student_confidence(const LogitVector& student, ClassIndex label,
                                  Temperature tau);

/// Tempered softmax restricted to the mask complement. nullopt signals an
/// empty complement (every class masked).
std::optional<ProbVector> masked_correlation(const LogitVector& logits,
                                             const MaskSet& mask,
                                             Temperature tau);

}  // namespace rld
