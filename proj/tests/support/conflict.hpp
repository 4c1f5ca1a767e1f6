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

#pragma once

#include <cstddef>
#include <vector>

#include "rld/logit.hpp"
#include "rld/refine.hpp"

namespace rld::testing {

struct ConflictMinimum {
  double loss = 0.0;
  std::vector<double> student;  // minimising student logits
  std::size_t iterations = 0;
};

/// Gradient descent with Armijo backtracking on alpha * SCD + beta * MCD over
/// free student logits, starting from zero. The teacher is given as
/// probabilities and enters through its log.
ConflictMinimum minimise_scd_mcd(const std::vector<double>& teacher_probs, ClassIndex label,
                                 MaskStrategy strategy, double alpha = 1.0, double beta = 1.0,
                                 double tau = 1.0, std::size_t max_iterations = 200000);

}  // namespace rld::testing
