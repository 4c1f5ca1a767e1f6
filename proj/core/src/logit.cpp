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

#include "rld/logit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rld/error.hpp"

namespace rld {
namespace {

constexpr double kNormTolerance = 1e-12;

void check_support(std::span<const ClassIndex> support, std::size_t n) {
  if (support.empty()) {
    throw Error(ErrorCode::kEmptySupport, "support has no classes");
  }
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] >= n || (k > 0 && support[k] <= support[k - 1])) {
      throw Error(ErrorCode::kShapeError,
                  "support must be strictly increasing class indices below " +
                      std::to_string(n));
    }
  }
}

// Scaled logits z_c / tau over the support, with the position of the max.
struct Scaled {
  std::vector<double> values;
  std::size_t max_pos = 0;
};

Scaled scale(const LogitVector& z, Temperature tau,
             std::span<const ClassIndex> support) {
  Scaled s;
  s.values.reserve(support.size());
  for (ClassIndex c : support) {
    const double v = z[c] / tau.value();
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidLogit,
                  "logit / temperature is not finite at class " +
                      std::to_string(c));
    }
    s.values.push_back(v);
  }
  s.max_pos = argmax(s.values);
  return s;
}

// log sum exp(v) computed as m + log1p(sum of the non-max terms), which keeps
// full relative precision when one term dominates.
double lse(const Scaled& s) {
  const double m = s.values[s.max_pos];
  double rest = 0.0;
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    if (k != s.max_pos) rest += std::exp(s.values[k] - m);
  }
  return m + std::log1p(rest);
}

}  // namespace

ClassSet full_support(std::size_t num_classes) {
  ClassSet s(num_classes);
  for (std::size_t i = 0; i < num_classes; ++i) s[i] = i;
  return s;
}

LogitVector::LogitVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw Error(ErrorCode::kShapeError, "a logit vector needs at least 2 classes");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::kInvalidLogit,
                  "non-finite logit at class " + std::to_string(i));
    }
  }
}

LogitVector::LogitVector(std::initializer_list<double> values)
    : LogitVector(std::vector<double>(values)) {}

Temperature::Temperature(double tau) : tau_(tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::kInvalidTemperature,
                "temperature must be a positive finite number");
  }
}

ProbVector::ProbVector(std::vector<double> values, ClassSet support)
    : values_(std::move(values)), support_(std::move(support)) {
  if (values_.size() != support_.size()) {
    throw Error(ErrorCode::kShapeError, "values and support differ in length");
  }
  for (std::size_t k = 1; k < support_.size(); ++k) {
    if (support_[k] <= support_[k - 1]) {
      throw Error(ErrorCode::kShapeError, "support must be strictly increasing");
    }
  }
  if (values_.empty()) return;
  double sum = 0.0;
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kInvalidDistribution, "probability outside [0, 1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kNormTolerance) {
    throw Error(ErrorCode::kInvalidDistribution, "probabilities do not sum to 1");
  }
}

ProbVector ProbVector::over_all_classes(std::vector<double> values) {
  ClassSet support = full_support(values.size());
  return ProbVector(std::move(values), std::move(support));
}

double ProbVector::probability_of(ClassIndex c) const {
  const auto it = std::lower_bound(support_.begin(), support_.end(), c);
  if (it == support_.end() || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - support_.begin())];
}

ClassIndex argmax(std::span<const double> values) {
  ClassIndex best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

void check_label(ClassIndex label, std::size_t num_classes) {
  if (label >= num_classes) {
    throw Error(ErrorCode::kInvalidLabel,
                "label " + std::to_string(label) + " is not below " +
                    std::to_string(num_classes));
  }
}

double log_sum_exp(const LogitVector& z, Temperature tau,
                   std::span<const ClassIndex> support) {
  check_support(support, z.size());
  return lse(scale(z, tau, support));
}

ProbVector softmax(const LogitVector& z, Temperature tau) {
  return softmax(z, tau, full_support(z.size()));
}

ProbVector softmax(const LogitVector& z, Temperature tau,
                   std::span<const ClassIndex> support) {
  check_support(support, z.size());
  const Scaled s = scale(z, tau, support);
  const double m = s.values[s.max_pos];
  std::vector<double> e(s.values.size());
  double rest = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    e[k] = std::exp(s.values[k] - m);
    if (k != s.max_pos) rest += e[k];
  }
  const double total = 1.0 + rest;
  for (double& v : e) v /= total;
  return ProbVector(std::move(e), ClassSet(support.begin(), support.end()));
}

std::vector<double> log_softmax(const LogitVector& z, Temperature tau) {
  return log_softmax(z, tau, full_support(z.size()));
}

std::vector<double> log_softmax(const LogitVector& z, Temperature tau,
                                std::span<const ClassIndex> support) {
  check_support(support, z.size());
  Scaled s = scale(z, tau, support);
  const double m = s.values[s.max_pos];
  double rest = 0.0;
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    if (k != s.max_pos) rest += std::exp(s.values[k] - m);
  }
  const double log_norm = std::log1p(rest);
  for (double& v : s.values) v = (v - m) - log_norm;
  return std::move(s.values);
}

double kl_div(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size() ||
      !std::equal(p.support().begin(), p.support().end(), q.support().begin())) {
    throw Error(ErrorCode::kSupportMismatch, "KL arguments have different supports");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) continue;
    if (q[k] == 0.0) {
      throw Error(ErrorCode::kDivergenceInfinite,
                  "q is zero where p is positive at class " +
                      std::to_string(p.support()[k]));
    }
    sum += p[k] * (std::log(p[k]) - std::log(q[k]));
  }
  return std::max(sum, 0.0);
}

double kl_div_log(std::span<const double> log_p, std::span<const double> log_q) {
  if (log_p.size() != log_q.size()) {
    throw Error(ErrorCode::kSupportMismatch, "KL arguments differ in length");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < log_p.size(); ++k) {
    sum += std::exp(log_p[k]) * (log_p[k] - log_q[k]);
  }
  return std::max(sum, 0.0);
}

double kl_div_target(std::span<const double> p, std::span<const double> log_q) {
  if (p.size() != log_q.size()) {
    throw Error(ErrorCode::kSupportMismatch, "KL arguments differ in length");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) continue;
    sum += p[k] * (std::log(p[k]) - log_q[k]);
  }
  return std::max(sum, 0.0);
}

double cross_entropy(const LogitVector& student, ClassIndex label) {
  check_label(label, student.size());
  return -log_softmax(student, Temperature(1.0))[label];
}

}  // namespace rld
