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

#include "rld/gradcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "rld/error.hpp"
#include "rld/losses.hpp"
#include "rld/mlp.hpp"
#include "rld/rng.hpp"

namespace rld {
namespace {

constexpr double kRelFloor = 1e-8;

enum class InstanceKind { kRandom, kTeacherWrong, kTied, kNearOneHot };

struct Instance {
  std::vector<double> teacher;
  std::vector<double> student;
  ClassIndex label = 0;
  double tau = 1.0;
  double alpha = 1.0;
  double beta = 4.0;
  double lr_mix = 0.5;
  MaskStrategy mask = MaskStrategy::kGE;
};

// Instances cycle through the four kinds and the temperatures {1, 2, 4}; the
// class count is uniform in [3, 20].
Instance make_instance(std::uint64_t seed, std::size_t k) {
  Pcg32 rng(seed, k);
  NormalSampler normal(rng);
  Instance in;
  const std::size_t classes = 3 + rng.bounded(18);
  in.tau = std::array{1.0, 2.0, 4.0}[k % 3];
  in.alpha = 0.5 + 1.5 * rng.uniform();
  in.beta = 1.0 + 7.0 * rng.uniform();
  in.lr_mix = rng.uniform();
  in.mask = (k / 4) % 2 == 0 ? MaskStrategy::kGE : MaskStrategy::kG;
  in.label = rng.bounded(static_cast<std::uint32_t>(classes));
  in.teacher.resize(classes);
  in.student.resize(classes);

  switch (static_cast<InstanceKind>(k % 4)) {
    case InstanceKind::kRandom:
    case InstanceKind::kTeacherWrong:
      for (auto& v : in.teacher) v = 2.0 * normal.next();
      for (auto& v : in.student) v = 2.0 * normal.next();
      break;
    case InstanceKind::kTied:
      // Ties matter on the teacher side only (masks and argmax read teacher
      // logits). An integer-valued student would reproduce the teacher's
      // softmax entries exactly, leaving gradient entries of exactly zero that
      // no central difference resolves below the relative-error floor.
      for (auto& v : in.teacher) v = static_cast<double>(rng.bounded(4)) - 1.0;
      for (auto& v : in.student) v = 1.5 * normal.next();
      break;
    case InstanceKind::kNearOneHot: {
      for (auto& v : in.teacher) v = normal.next();
      for (auto& v : in.student) v = normal.next();
      in.teacher[rng.bounded(static_cast<std::uint32_t>(classes))] += 8.0;
      in.student[rng.bounded(static_cast<std::uint32_t>(classes))] += 8.0;
      break;
    }
  }
  if (static_cast<InstanceKind>(k % 4) == InstanceKind::kTeacherWrong &&
      argmax(in.teacher) == in.label) {
    in.label = (in.label + 1 + rng.bounded(static_cast<std::uint32_t>(classes - 1))) % classes;
  }
  return in;
}

DistillSpec spec_for(Method m, const Instance& in) {
  DistillSpec spec = DistillSpec::defaults_for(m);
  spec.alpha = in.alpha;
  spec.beta = in.beta;
  spec.tau = in.tau;
  spec.mask_strategy = in.mask;
  spec.lr_mix = in.lr_mix;
  return spec;
}

struct Probe {
  ScalarFunction loss;
  GradientVector analytic;
};

// Loss closure and analytic gradient for one named check at one instance.
Probe build_probe(const std::string& name, const Instance& in) {
  const LogitVector teacher(in.teacher);
  const LogitVector student(in.student);
  const Temperature tau(in.tau);
  const ClassIndex y = in.label;
  auto lv = [](std::span<const double> z) {
    return LogitVector(std::vector<double>(z.begin(), z.end()));
  };

  if (name == "CE") {
    return {[=](auto z) { return cross_entropy(lv(z), y); }, grad_ce(student, y)};
  }
  if (name == "KD") {
    return {[=](auto z) { return kd_loss(teacher, lv(z), tau); },
            grad_kd(teacher, student, tau)};
  }
  if (name == "SCD") {
    return {[=](auto z) { return scd_loss(teacher, lv(z), y, tau); },
            grad_scd(teacher, student, y, tau)};
  }
  if (name == "MCD") {
    const MaskStrategy m = in.mask;
    return {[=](auto z) { return mcd_loss(teacher, lv(z), y, tau, m); },
            grad_mcd(teacher, student, y, tau, m)};
  }
  if (name == "RC") {
    // The corrected target is a constant with respect to the student.
    const DistillSpec spec = spec_for(Method::kRC, in);
    const CorrectedTarget target =
        correct_logits(teacher, student, y, Method::kRC, spec.lr_mix, tau);
    return {[=](auto z) { return corrected_kd(target, lv(z), y, spec).loss.total; },
            grad_total(teacher, student, y, spec)};
  }
  Method method;
  if (name == "DKD-total") {
    method = Method::kDKD;
  } else if (name == "RLD-total") {
    method = Method::kRLD;
  } else if (name == "LA") {
    method = Method::kLA;
  } else if (name == "LR") {
    method = Method::kLR;
  } else {
    throw Error(ErrorCode::kConfigError, "unknown gradient check '" + name + "'");
  }
  const DistillSpec spec = spec_for(method, in);
  return {[=](auto z) { return loss_total(teacher, lv(z), y, spec).total; },
          grad_total(teacher, student, y, spec)};
}

void merge(MethodCheck& check, const FiniteDiffReport& r) {
  ++check.instances;
  check.max_abs_err = std::max(check.max_abs_err, r.max_abs_err);
  check.max_rel_err = std::max(check.max_rel_err, r.max_rel_err);
  check.pass = check.pass && r.pass;
}

std::vector<double> flatten(const Mlp& m) {
  std::vector<double> p;
  for (const Layer& l : m.layers()) {
    p.insert(p.end(), l.weights.begin(), l.weights.end());
    p.insert(p.end(), l.bias.begin(), l.bias.end());
  }
  return p;
}

void unflatten(Mlp& m, std::span<const double> p) {
  std::size_t k = 0;
  for (Layer& l : m.mutable_layers()) {
    for (double& w : l.weights) w = p[k++];
    for (double& b : l.bias) b = p[k++];
  }
}

// Mean per-sample objective of a batch through a [4,5,3] network versus
// backward() of the analytic logit gradients.
MethodCheck check_network(Method method, const GradCheckOptions& opt) {
  MethodCheck check;
  check.name = "network/" + std::string(to_string(method));
  constexpr std::size_t kBatch = 6;
  constexpr std::size_t kTrials = 5;
  for (std::size_t trial = 0; trial < kTrials; ++trial) {
    Pcg32 rng(opt.seed ^ 0x6e6574ull, trial * 16 + static_cast<std::size_t>(method));
    NormalSampler normal(rng);
    Mlp model(MlpSpec{{4, 5, 3}, Activation::kReLU, opt.seed + trial});
    for (Layer& l : model.mutable_layers()) {
      for (double& b : l.bias) b = 0.1 * normal.next();
    }
    Matrix x(kBatch, 4);
    Matrix teacher_logits(kBatch, 3);
    std::vector<ClassIndex> labels(kBatch);
    for (std::size_t n = 0; n < kBatch; ++n) {
      for (std::size_t d = 0; d < 4; ++d) x(n, d) = normal.next();
      for (std::size_t c = 0; c < 3; ++c) teacher_logits(n, c) = 2.0 * normal.next();
      labels[n] = rng.bounded(3);
    }
    DistillSpec spec = DistillSpec::defaults_for(method);
    spec.tau = std::array{1.0, 2.0, 4.0}[trial % 3];
    spec.mask_strategy = trial % 2 == 0 ? MaskStrategy::kGE : MaskStrategy::kG;

    auto row = [](const Matrix& m, std::size_t n) {
      return LogitVector(std::vector<double>(m.row(n).begin(), m.row(n).end()));
    };

    const ForwardCache cache = forward(model, x);
    std::vector<CorrectedTarget> rc_targets;
    Matrix g(kBatch, 3);
    for (std::size_t n = 0; n < kBatch; ++n) {
      const LogitVector t = row(teacher_logits, n);
      const LogitVector s = row(cache.logits, n);
      if (method == Method::kRC) {
        rc_targets.push_back(correct_logits(t, s, labels[n], method, spec.lr_mix,
                                            spec.temperature()));
      }
      const GradientVector gn = grad_total(t, s, labels[n], spec);
      for (std::size_t c = 0; c < 3; ++c) g(n, c) = gn[c] / static_cast<double>(kBatch);
    }
    const ParamGrads pg = backward(model, cache, g);
    std::vector<double> analytic;
    for (std::size_t l = 0; l < pg.weights.size(); ++l) {
      analytic.insert(analytic.end(), pg.weights[l].begin(), pg.weights[l].end());
      analytic.insert(analytic.end(), pg.bias[l].begin(), pg.bias[l].end());
    }
    if (opt.inject_fault && trial == 0) analytic[0] += 0.1;

    Mlp probe = model;
    auto loss = [&](std::span<const double> params) {
      unflatten(probe, params);
      const Matrix z = forward_logits(probe, x);
      double sum = 0.0;
      for (std::size_t n = 0; n < kBatch; ++n) {
        const LogitVector s = row(z, n);
        sum += method == Method::kRC
                   ? corrected_kd(rc_targets[n], s, labels[n], spec).loss.total
                   : loss_total(row(teacher_logits, n), s, labels[n], spec).total;
      }
      return sum / static_cast<double>(kBatch);
    };
    merge(check, finite_diff_check(loss, flatten(model), analytic, opt.step, opt.tolerance));
  }
  return check;
}

}  // namespace

FiniteDiffReport finite_diff_check(const ScalarFunction& loss,
                                   std::span<const double> point,
                                   std::span<const double> analytic,
                                   double step, double tolerance) {
  if (!(step > 0.0)) throw Error(ErrorCode::kConfigError, "finite-difference step must be positive");
  if (point.size() != analytic.size()) {
    throw Error(ErrorCode::kShapeError, "point and analytic gradient differ in length");
  }
  FiniteDiffReport report;
  std::vector<double> x(point.begin(), point.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double up = loss(x);
    x[i] = saved - step;
    const double down = loss(x);
    x[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw Error(ErrorCode::kProbeFailure,
                  "loss is not finite when probing coordinate " + std::to_string(i));
    }
    const double numeric = (up - down) / (2.0 * step);
    const double abs_err = std::abs(numeric - analytic[i]);
    const double rel_err = abs_err / std::max(std::abs(analytic[i]), kRelFloor);
    report.max_abs_err = std::max(report.max_abs_err, abs_err);
    if (rel_err > report.max_rel_err) {
      report.max_rel_err = rel_err;
      report.worst_index = i;
    }
  }
  report.pass = report.max_rel_err <= tolerance;
  return report;
}

bool GradCheckReport::all_pass() const {
  auto ok = [](const MethodCheck& m) { return m.pass; };
  return std::all_of(methods.begin(), methods.end(), ok) &&
         std::all_of(network.begin(), network.end(), ok);
}

GradCheckReport run_gradient_suite(const GradCheckOptions& options) {
  GradCheckReport report;
  for (const char* name :
       {"CE", "KD", "SCD", "MCD", "DKD-total", "RLD-total", "LA", "RC", "LR"}) {
    MethodCheck check;
    check.name = name;
    for (std::size_t k = 0; k < options.instances; ++k) {
      const Instance in = make_instance(options.seed, k);
      Probe probe = build_probe(name, in);
      if (options.inject_fault && k == 0) probe.analytic[0] += 0.1;
      merge(check, finite_diff_check(probe.loss, in.student, probe.analytic,
                                     options.step, options.tolerance));
    }
    report.methods.push_back(check);
  }
  for (Method m : {Method::kCeOnly, Method::kKD, Method::kDKD, Method::kRLD,
                   Method::kLA, Method::kRC, Method::kLR}) {
    report.network.push_back(check_network(m, options));
  }
  return report;
}

}  // namespace rld
