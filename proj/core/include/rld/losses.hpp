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

// Distillation objectives with analytic per-sample gradients with respect to
// the student logits.
//
// Temperature convention: every distillation term is tau^2 * KL(. || .) of
// tempered distributions, so its gradient carries a single factor of tau.
// At tau = 1 the SCD gradient reduces to the two-branch closed form
//   d/dz_true = p_true - p_max^T,
//   d/dz_i    = p_i (p_true - p_max^T) / (p_true - 1)   (i != true).
//
// RC reads "max of the student's output" from the current student logits but
// treats the corrected target as a constant (no gradient through the max).
// The other plausible reading, adding the max to the student's own true-class
// logit, is not implemented.

#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "rld/logit.hpp"
#include "rld/refine.hpp"

namespace rld {

enum class Method { kCeOnly, kKD, kDKD, kRLD, kLA, kRC, kLR };

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

struct DistillSpec {
  Method method = Method::kRLD;
  double alpha = 1.0;
  double beta = 4.0;
  double tau = 4.0;
  MaskStrategy mask_strategy = MaskStrategy::kGE;
  // Weight of the KL term for KD / LA / RC / LR.
  double kd_weight = 1.0;
  // One-hot share of the LR target.
  double lr_mix = 0.5;

  /// Method-specific defaults: DKD uses alpha = 1, beta = 8; everything else
  /// alpha = 1, beta = 4, tau = 4.
  static DistillSpec defaults_for(Method m);

  void validate() const;
  Temperature temperature() const { return Temperature(tau); }
};

/// Components of a per-sample (or batch-mean) loss. For DKD the target-class
/// term is reported in `scd` and the non-target term in `mcd`.
struct LossBreakdown {
  double total = 0.0;
  double ce = 0.0;
  double scd = 0.0;
  double mcd = 0.0;
  double kd = 0.0;
  bool masked_all = false;
};

/// d loss / d student logit, one entry per class.
using GradientVector = std::vector<double>;

struct LossAndGradient {
  LossBreakdown loss;
  GradientVector gradient;
};

double scd_loss(const LogitVector& teacher, const LogitVector& student,
                ClassIndex label, Temperature tau);

/// 0 when the mask complement has fewer than two classes.
double mcd_loss(const LogitVector& teacher, const LogitVector& student,
                ClassIndex label, Temperature tau, MaskStrategy strategy);

/// CE + alpha * SCD + beta * MCD. Requires spec.method == RLD.
LossBreakdown rld_loss(const LogitVector& teacher, const LogitVector& student,
                       ClassIndex label, const DistillSpec& spec);

double kd_loss(const LogitVector& teacher, const LogitVector& student,
               Temperature tau);

/// alpha * TCKD + beta * NCKD (no CE term).
LossBreakdown dkd_loss(const LogitVector& teacher, const LogitVector& student,
                       ClassIndex label, double alpha, double beta,
                       Temperature tau);

/// Corrected teacher logits (LA, RC) or a corrected target distribution (LR).
using CorrectedTarget = std::variant<LogitVector, ProbVector>;

CorrectedTarget correct_logits(const LogitVector& teacher,
                               const LogitVector& student, ClassIndex label,
                               Method method, double lr_mix, Temperature tau);

/// CE + kd_weight * tau^2 KL(target || softmax(student / tau)) with the
/// target held constant.
LossAndGradient corrected_kd(const CorrectedTarget& target,
                             const LogitVector& student, ClassIndex label,
                             const DistillSpec& spec);

GradientVector grad_ce(const LogitVector& student, ClassIndex label);
GradientVector grad_kd(const LogitVector& teacher, const LogitVector& student,
                       Temperature tau);
GradientVector grad_scd(const LogitVector& teacher, const LogitVector& student,
                        ClassIndex label, Temperature tau);
GradientVector grad_mcd(const LogitVector& teacher, const LogitVector& student,
                        ClassIndex label, Temperature tau, MaskStrategy strategy);
GradientVector grad_dkd(const LogitVector& teacher, const LogitVector& student,
                        ClassIndex label, double alpha, double beta,
                        Temperature tau);

/// Full per-sample objective of any method (CE included) and its gradient.
/// Training uses this entry point.
LossAndGradient evaluate_objective(const LogitVector& teacher,
                                   const LogitVector& student, ClassIndex label,
                                   const DistillSpec& spec);

LossBreakdown loss_total(const LogitVector& teacher, const LogitVector& student,
                         ClassIndex label, const DistillSpec& spec);
GradientVector grad_total(const LogitVector& teacher, const LogitVector& student,
                          ClassIndex label, const DistillSpec& spec);

}  // namespace rld
