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

// Probability and divergence primitives. Everything is float64 and computed
// from log-space quantities; the losses in losses.hpp are built on these.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace rld {

using ClassIndex = std::size_t;

/// Strictly increasing list of class indices.
using ClassSet = std::vector<ClassIndex>;

ClassSet full_support(std::size_t num_classes);

/// Raw per-class scores for one sample. Always at least two classes, all
/// entries finite.
class LogitVector {
 public:
  explicit LogitVector(std::vector<double> values);
  LogitVector(std::initializer_list<double> values);

  std::size_t num_classes() const noexcept { return values_.size(); }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const LogitVector&, const LogitVector&) = default;

 private:
  std::vector<double> values_;
};

class Temperature {
 public:
  explicit Temperature(double tau);

  double value() const noexcept { return tau_; }

 private:
  double tau_;
};

/// A normalized distribution over an explicit support. values()[k] is the
/// probability of class support()[k].
class ProbVector {
 public:
  ProbVector(std::vector<double> values, ClassSet support);

  /// Distribution over classes 0..n-1.
  static ProbVector over_all_classes(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const ClassIndex> support() const noexcept { return support_; }
  double operator[](std::size_t k) const { return values_[k]; }

  /// Probability of class `c`; 0 when `c` is outside the support.
  double probability_of(ClassIndex c) const;

 private:
  std::vector<double> values_;
  ClassSet support_;
};

/// Lowest index wins ties.
ClassIndex argmax(std::span<const double> values);

/// Throws InvalidLabel unless label < num_classes.
void check_label(ClassIndex label, std::size_t num_classes);

/// log sum_{c in support} exp(z_c / tau), with max subtraction.
double log_sum_exp(const LogitVector& z, Temperature tau,
                   std::span<const ClassIndex> support);

ProbVector softmax(const LogitVector& z, Temperature tau);
ProbVector softmax(const LogitVector& z, Temperature tau,
                   std::span<const ClassIndex> support);

/// Entry k corresponds to class support[k] (or class k without a support).
std::vector<double> log_softmax(const LogitVector& z, Temperature tau);
std::vector<double> log_softmax(const LogitVector& z, Temperature tau,
                                std::span<const ClassIndex> support);

/// Forward KL(p || q) with 0 ln 0 = 0. Both must share the same support.
double kl_div(const ProbVector& p, const ProbVector& q);

/// KL between two distributions given by their log-probabilities on the same
/// support: sum exp(lp) (lp - lq), clamped at 0.
double kl_div_log(std::span<const double> log_p, std::span<const double> log_q);

/// KL of an explicit target `p` (may contain zeros) against log-probs `log_q`.
double kl_div_target(std::span<const double> p, std::span<const double> log_q);

double cross_entropy(const LogitVector& student, ClassIndex label);

}  // namespace rld
