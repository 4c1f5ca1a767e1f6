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

// Randomised invariant checks over every module. Both the gtest property
// suite and the acceptance runner execute these, so a property is written
// once and reported in two places.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rld::testing {

struct PropertyResult {
  std::string name;
  std::size_t cases = 0;
  bool pass = true;
  std::string detail;  // first counterexample, empty on success
};

struct PropertyOptions {
  std::uint64_t seed = 0x70726f70;
  std::size_t trials = 1000;
};

std::vector<PropertyResult> run_structural_properties(const PropertyOptions& options = {});

}  // namespace rld::testing
