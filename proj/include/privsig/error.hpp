//
// Copyright 2026 The privsig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef PRIVSIG_ERROR_HPP_
#define PRIVSIG_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace privsig {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kNotPositiveDefinite,
  kNonConvergence,
  kInvalidAlphas,
  kAlphaOutOfRange,
  kDegenerateCovariance,
  kInternal,
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kNotPositiveDefinite:
      return "NotPositiveDefinite";
    case ErrorCode::kNonConvergence:
      return "NonConvergence";
    case ErrorCode::kInvalidAlphas:
      return "InvalidAlphas";
    case ErrorCode::kAlphaOutOfRange:
      return "AlphaOutOfRange";
    case ErrorCode::kDegenerateCovariance:
      return "DegenerateCovariance";
    case ErrorCode::kInternal:
      return "Internal";
  }
  return "Unknown";
}

// Base for every error raised by the library. Callers that only need to
// distinguish failure kinds can switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(const std::string& message, double eigenvalue)
      : Error(ErrorCode::kNotPositiveDefinite,
              message + " (offending eigenvalue " + std::to_string(eigenvalue) +
                  ")"),
        eigenvalue_(eigenvalue) {}

  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

// Non-fatal condition attached to a result, e.g. a source with no cross
// covariance. Solvers proceed and record it.
struct Warning {
  std::string code;
  std::string message;
};

}  // namespace privsig

#endif  // PRIVSIG_ERROR_HPP_
