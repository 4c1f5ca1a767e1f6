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

// Central-difference verification of analytic gradients, and the randomized
// suite behind `rld check-grads`.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rld {

struct FiniteDiffReport {
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  std::size_t worst_index = 0;
  bool pass = false;
};

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Compares (f(x + h e_i) - f(x - h e_i)) / 2h against analytic[i] for every
/// coordinate. Relative error uses max(|analytic_i|, 1e-8) as denominator;
/// pass iff the largest relative error is <= tolerance. Throws ProbeFailure
/// if f returns a non-finite value.
FiniteDiffReport finite_diff_check(const ScalarFunction& loss,
                                   std::span<const double> point,
                                   std::span<const double> analytic,
                                   double step, double tolerance);

struct GradCheckOptions {
  std::size_t instances = 50;
  std::uint64_t seed = 0x5eed;
  double step = 1e-5;
  double tolerance = 1e-4;
  // Test hook: adds 0.1 to one analytic entry of the first instance of every
  // check so the suite must fail.
  bool inject_fault = false;
};

struct MethodCheck {
  std::string name;
  std::size_t instances = 0;
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  bool pass = true;
};

struct GradCheckReport {
  /// CE, KD, SCD, MCD, DKD-total, RLD-total, LA, RC, LR in that order.
  std::vector<MethodCheck> methods;
  /// Parameter gradients through a [4,5,3] network, one entry per method.
  std::vector<MethodCheck> network;

  bool all_pass() const;
};

GradCheckReport run_gradient_suite(const GradCheckOptions& options);

}  // namespace rld
