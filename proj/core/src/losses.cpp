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

#include "rld/losses.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

#include "rld/error.hpp"

namespace rld {
namespace {

struct Term {
  double loss = 0.0;
  GradientVector grad;
};

void check_pair(const LogitVector& teacher, const LogitVector& student) {
  if (teacher.size() != student.size()) {
    throw Error(ErrorCode::kShapeError,
                "teacher has " + std::to_string(teacher.size()) +
                    " classes, student has " + std::to_string(student.size()));
  }
}

Term ce_term(const LogitVector& student, ClassIndex label, bool want_grad) {
  Term t;
  t.loss = cross_entropy(student, label);
  if (want_grad) {
    const ProbVector p = softmax(student, Temperature(1.0));
    t.grad.assign(p.values().begin(), p.values().end());
    t.grad[label] -= 1.0;
  }
  return t;
}

// tau^2 KL(target || {p_label, 1 - p_label}) of the student. The non-label
// branch of the gradient is -tau (q - h) p_i / (1 - q), evaluated as
// -tau (q - h) times the student's softmax renormalized over the other
// classes, which stays accurate when q approaches 1.
Term confidence_term(const ConfidencePair& target, const LogitVector& student,
                     ClassIndex label, Temperature tau, bool want_grad) {
  const double t = tau.value();
  const ConfidencePair own = confidence_at(student, label, tau);
  const std::array<double, 2> lp{target.log_head, target.log_rest};
  const std::array<double, 2> lq{own.log_head, own.log_rest};
  Term term;
  term.loss = t * t * kl_div_log(lp, lq);
  if (want_grad) {
    const double diff = own.head - target.head;
    term.grad.assign(student.size(), 0.0);
    term.grad[label] = t * diff;
    ClassSet others;
    others.reserve(student.size() - 1);
    for (ClassIndex i = 0; i < student.size(); ++i) {
      if (i != label) others.push_back(i);
    }
    const ProbVector rest = softmax(student, tau, others);
    for (std::size_t k = 0; k < others.size(); ++k) {
      term.grad[others[k]] = -t * diff * rest[k];
    }
  }
  return term;
}

// tau^2 KL over the mask complement; zero (with zero gradient) when fewer than
// two classes survive the mask.
Term masked_term(const LogitVector& teacher, const LogitVector& student,
                 const ClassSet& complement, Temperature tau, bool want_grad) {
  Term term;
  if (want_grad) term.grad.assign(student.size(), 0.0);
  if (complement.size() < 2) return term;
  const double t = tau.value();
  const std::vector<double> lp = log_softmax(teacher, tau, complement);
  const std::vector<double> lq = log_softmax(student, tau, complement);
  term.loss = t * t * kl_div_log(lp, lq);
  if (want_grad) {
    for (std::size_t k = 0; k < complement.size(); ++k) {
      term.grad[complement[k]] = t * (std::exp(lq[k]) - std::exp(lp[k]));
    }
  }
  return term;
}

Term full_kd_term(const LogitVector& teacher, const LogitVector& student,
                  Temperature tau, bool want_grad) {
  const double t = tau.value();
  const std::vector<double> lp = log_softmax(teacher, tau);
  const std::vector<double> lq = log_softmax(student, tau);
  Term term;
  term.loss = t * t * kl_div_log(lp, lq);
  if (want_grad) {
    term.grad.resize(student.size());
    for (std::size_t i = 0; i < student.size(); ++i) {
      term.grad[i] = t * (std::exp(lq[i]) - std::exp(lp[i]));
    }
  }
  return term;
}

Term target_kd_term(const ProbVector& target, const LogitVector& student,
                    Temperature tau, bool want_grad) {
  if (target.size() != student.size()) {
    throw Error(ErrorCode::kSupportMismatch,
                "target distribution must cover every class");
  }
  const double t = tau.value();
  const std::vector<double> lq = log_softmax(student, tau);
  Term term;
  term.loss = t * t * kl_div_target(target.values(), lq);
  if (want_grad) {
    term.grad.resize(student.size());
    for (std::size_t i = 0; i < student.size(); ++i) {
      term.grad[i] = t * (std::exp(lq[i]) - target[i]);
    }
  }
  return term;
}

// ce + a * x + b * y, in that order, for both the value and the gradient.
// RLD and DKD share this so their results agree bit for bit whenever their
// component terms do.
LossAndGradient assemble_pair(const Term& ce, double a, const Term& x,
                              double b, const Term& y, bool want_grad) {
  LossAndGradient out;
  out.loss.ce = ce.loss;
  out.loss.scd = x.loss;
  out.loss.mcd = y.loss;
  out.loss.total = ce.loss + a * x.loss + b * y.loss;
  if (want_grad) {
    out.gradient.resize(ce.grad.size());
    for (std::size_t i = 0; i < ce.grad.size(); ++i) {
      out.gradient[i] = ce.grad[i] + a * x.grad[i] + b * y.grad[i];
    }
  }
  return out;
}

LossAndGradient assemble_kd(const Term& ce, double w, const Term& kd,
                            bool want_grad) {
  LossAndGradient out;
  out.loss.ce = ce.loss;
  out.loss.kd = kd.loss;
  out.loss.total = ce.loss + w * kd.loss;
  if (want_grad) {
    out.gradient.resize(ce.grad.size());
    for (std::size_t i = 0; i < ce.grad.size(); ++i) {
      out.gradient[i] = ce.grad[i] + w * kd.grad[i];
    }
  }
  return out;
}

LossAndGradient corrected(const CorrectedTarget& target,
                          const LogitVector& student, ClassIndex label,
                          const DistillSpec& spec, bool want_grad) {
  const Temperature tau = spec.temperature();
  const Term ce = ce_term(student, label, want_grad);
  const Term kd = std::visit(
      [&](const auto& tgt) {
        using T = std::decay_t<decltype(tgt)>;
        if constexpr (std::is_same_v<T, LogitVector>) {
          check_pair(tgt, student);
          return full_kd_term(tgt, student, tau, want_grad);
        } else {
          return target_kd_term(tgt, student, tau, want_grad);
        }
      },
      target);
  return assemble_kd(ce, spec.kd_weight, kd, want_grad);
}

LossAndGradient compute(const LogitVector& teacher, const LogitVector& student,
                        ClassIndex label, const DistillSpec& spec,
                        bool want_grad) {
  check_pair(teacher, student);
  check_label(label, student.size());
  spec.validate();
  const Temperature tau = spec.temperature();

  switch (spec.method) {
    case Method::kCeOnly: {
      const Term ce = ce_term(student, label, want_grad);
      LossAndGradient out;
      out.loss.ce = ce.loss;
      out.loss.total = ce.loss;
      out.gradient = ce.grad;
      return out;
    }
    case Method::kKD: {
      const Term ce = ce_term(student, label, want_grad);
      const Term kd = full_kd_term(teacher, student, tau, want_grad);
      return assemble_kd(ce, spec.kd_weight, kd, want_grad);
    }
    case Method::kRLD: {
      const Term ce = ce_term(student, label, want_grad);
      const Term scd = confidence_term(teacher_confidence(teacher, tau), student,
                                       label, tau, want_grad);
      const MaskSet mask = compute_mask(teacher, label, spec.mask_strategy);
      const Term mcd = masked_term(teacher, student, mask.complement, tau, want_grad);
      LossAndGradient out = assemble_pair(ce, spec.alpha, scd, spec.beta, mcd, want_grad);
      out.loss.masked_all = mask.complement.empty();
      return out;
    }
    case Method::kDKD: {
      const Term ce = ce_term(student, label, want_grad);
      const Term tckd = confidence_term(confidence_at(teacher, label, tau), student,
                                        label, tau, want_grad);
      const MaskSet mask = MaskSet::single(label, student.size());
      const Term nckd = masked_term(teacher, student, mask.complement, tau, want_grad);
      return assemble_pair(ce, spec.alpha, tckd, spec.beta, nckd, want_grad);
    }
    case Method::kLA:
    case Method::kRC:
    case Method::kLR: {
      const CorrectedTarget target =
          correct_logits(teacher, student, label, spec.method, spec.lr_mix, tau);
      return corrected(target, student, label, spec, want_grad);
    }
  }
  throw Error(ErrorCode::kConfigError, "unhandled method");
}

void check_weight(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw Error(ErrorCode::kConfigError,
                std::string(name) + " must be a non-negative finite number");
  }
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kCeOnly: return "CE_ONLY";
    case Method::kKD: return "KD";
    case Method::kDKD: return "DKD";
    case Method::kRLD: return "RLD";
    case Method::kLA: return "LA";
    case Method::kRC: return "RC";
    case Method::kLR: return "LR";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (Method m : {Method::kCeOnly, Method::kKD, Method::kDKD, Method::kRLD,
                   Method::kLA, Method::kRC, Method::kLR}) {
    if (upper == to_string(m)) return m;
  }
  throw Error(ErrorCode::kConfigError, "unknown method '" + std::string(text) +
                                           "' (expected CE_ONLY, KD, DKD, RLD, LA, RC or LR)");
}

DistillSpec DistillSpec::defaults_for(Method m) {
  DistillSpec spec;
  spec.method = m;
  if (m == Method::kDKD) spec.beta = 8.0;
  return spec;
}

void DistillSpec::validate() const {
  check_weight(alpha, "alpha");
  check_weight(beta, "beta");
  check_weight(kd_weight, "kd_weight");
  if (!(lr_mix >= 0.0 && lr_mix <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "lr_mix must lie in [0, 1]");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::kConfigError, "tau must be a positive finite number");
  }
}

double scd_loss(const LogitVector& teacher, const LogitVector& student,
                ClassIndex label, Temperature tau) {
  check_pair(teacher, student);
  check_label(label, student.size());
  return confidence_term(teacher_confidence(teacher, tau), student, label, tau, false).loss;
}

double mcd_loss(const LogitVector& teacher, const LogitVector& student,
                ClassIndex label, Temperature tau, MaskStrategy strategy) {
  check_pair(teacher, student);
  const MaskSet mask = compute_mask(teacher, label, strategy);
  return masked_term(teacher, student, mask.complement, tau, false).loss;
}

LossBreakdown rld_loss(const LogitVector& teacher, const LogitVector& student,
                       ClassIndex label, const DistillSpec& spec) {
  if (spec.method != Method::kRLD) {
    throw Error(ErrorCode::kConfigError, "rld_loss needs method RLD");
  }
  return compute(teacher, student, label, spec, false).loss;
}

double kd_loss(const LogitVector& teacher, const LogitVector& student,
               Temperature tau) {
  check_pair(teacher, student);
  return full_kd_term(teacher, student, tau, false).loss;
}

LossBreakdown dkd_loss(const LogitVector& teacher, const LogitVector& student,
                       ClassIndex label, double alpha, double beta,
                       Temperature tau) {
  check_pair(teacher, student);
  check_label(label, student.size());
  check_weight(alpha, "alpha");
  check_weight(beta, "beta");
  const Term tckd = confidence_term(confidence_at(teacher, label, tau), student,
                                    label, tau, false);
  const MaskSet mask = MaskSet::single(label, student.size());
  const Term nckd = masked_term(teacher, student, mask.complement, tau, false);
  LossBreakdown out;
  out.scd = tckd.loss;
  out.mcd = nckd.loss;
  out.total = alpha * tckd.loss + beta * nckd.loss;
  return out;
}

CorrectedTarget correct_logits(const LogitVector& teacher,
                               const LogitVector& student, ClassIndex label,
                               Method method, double lr_mix, Temperature tau) {
  check_pair(teacher, student);
  check_label(label, teacher.size());
  switch (method) {
    case Method::kLA: {
      std::vector<double> v(teacher.values().begin(), teacher.values().end());
      std::swap(v[argmax(v)], v[label]);
      return LogitVector(std::move(v));
    }
    case Method::kRC: {
      std::vector<double> v(teacher.values().begin(), teacher.values().end());
      v[label] += *std::max_element(student.values().begin(), student.values().end());
      return LogitVector(std::move(v));
    }
    case Method::kLR: {
      if (!(lr_mix >= 0.0 && lr_mix <= 1.0)) {
        throw Error(ErrorCode::kConfigError, "lr_mix must lie in [0, 1]");
      }
      const ProbVector soft = softmax(teacher, tau);
      std::vector<double> p(teacher.size());
      for (std::size_t c = 0; c < p.size(); ++c) {
        p[c] = (1.0 - lr_mix) * soft[c] + (c == label ? lr_mix : 0.0);
      }
      return ProbVector::over_all_classes(std::move(p));
    }
    default:
      throw Error(ErrorCode::kConfigError,
                  "correct_logits supports LA, RC and LR, not " +
                      std::string(to_string(method)));
  }
}

LossAndGradient corrected_kd(const CorrectedTarget& target,
                             const LogitVector& student, ClassIndex label,
                             const DistillSpec& spec) {
  check_label(label, student.size());
  spec.validate();
  return corrected(target, student, label, spec, true);
}

GradientVector grad_ce(const LogitVector& student, ClassIndex label) {
  check_label(label, student.size());
  return ce_term(student, label, true).grad;
}

GradientVector grad_kd(const LogitVector& teacher, const LogitVector& student,
                       Temperature tau) {
  check_pair(teacher, student);
  return full_kd_term(teacher, student, tau, true).grad;
}

GradientVector grad_scd(const LogitVector& teacher, const LogitVector& student,
                        ClassIndex label, Temperature tau) {
  check_pair(teacher, student);
  check_label(label, student.size());
  return confidence_term(teacher_confidence(teacher, tau), student, label, tau, true).grad;
}

GradientVector grad_mcd(const LogitVector& teacher, const LogitVector& student,
                        ClassIndex label, Temperature tau, MaskStrategy strategy) {
  check_pair(teacher, student);
  const MaskSet mask = compute_mask(teacher, label, strategy);
  return masked_term(teacher, student, mask.complement, tau, true).grad;
}

GradientVector grad_dkd(const LogitVector& teacher, const LogitVector& student,
                        ClassIndex label, double alpha, double beta,
                        Temperature tau) {
  check_pair(teacher, student);
  check_label(label, student.size());
  const Term tckd = confidence_term(confidence_at(teacher, label, tau), student,
                                    label, tau, true);
  const MaskSet mask = MaskSet::single(label, student.size());
  const Term nckd = masked_term(teacher, student, mask.complement, tau, true);
  GradientVector g(student.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = alpha * tckd.grad[i] + beta * nckd.grad[i];
  }
  return g;
}

LossAndGradient evaluate_objective(const LogitVector& teacher,
                                   const LogitVector& student, ClassIndex label,
                                   const DistillSpec& spec) {
  return compute(teacher, student, label, spec, true);
}

LossBreakdown loss_total(const LogitVector& teacher, const LogitVector& student,
                         ClassIndex label, const DistillSpec& spec) {
  return compute(teacher, student, label, spec, false).loss;
}

GradientVector grad_total(const LogitVector& teacher, const LogitVector& student,
                          ClassIndex label, const DistillSpec& spec) {
  return compute(teacher, student, label, spec, true).gradient;
}

}  // namespace rld
