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

#include <iosfwd>
#include <string>
#include <vector>

#include "rld/error.hpp"

namespace rld::cli {

/// Process exit status for a library error: 2 config, 3 data or I/O,
/// 4 incompatible model, 5 verification failure, 1 anything else.
int exit_code_for(ErrorCode code);

/// Runs one rld command. `args` excludes the program name. Diagnostics go to
/// `err`; reports and summaries go to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rld::cli
