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

#include <stdexcept>
#include <string>
#include <string_view>

namespace rld {

enum class ErrorCode {
  kEmptySupport,
  kInvalidLogit,
  kInvalidTemperature,
  kInvalidDistribution,
  kSupportMismatch,
  kDivergenceInfinite,
  kInvalidLabel,
  kProbeFailure,
  kConfigError,
  kShapeError,
  kCacheError,
  kIoError,
  kDataError,
  kIncompatibleTeacher,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library. Callers switch on code() when the
/// kind matters (the CLI maps codes to exit statuses).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rld
