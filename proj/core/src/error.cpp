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

#include "rld/error.hpp"

namespace rld {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptySupport: return "EmptySupport";
    case ErrorCode::kInvalidLogit: return "InvalidLogit";
    case ErrorCode::kInvalidTemperature: return "InvalidTemperature";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kSupportMismatch: return "SupportMismatch";
    case ErrorCode::kDivergenceInfinite: return "DivergenceInfinite";
    case ErrorCode::kInvalidLabel: return "InvalidLabel";
    case ErrorCode::kProbeFailure: return "ProbeFailure";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kShapeError: return "ShapeError";
    case ErrorCode::kCacheError: return "CacheError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kDataError: return "DataError";
    case ErrorCode::kIncompatibleTeacher: return "IncompatibleTeacher";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace rld
