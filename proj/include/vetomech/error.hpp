// Copyright 2026 The vetomech Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vetomech {

enum class ErrorKind {
  kInvalidInput,    // violated precondition or malformed input
  kDomainError,     // argument outside a closed form's real domain
  kUnsupported,     // parameter regime the solvers do not cover
  kNonFinite,       // integrand / objective produced NaN or inf
  kBudgetExceeded,  // quadrature or iteration budget exhausted
  kNoBracket,       // root finder called without a sign change
  kNotValuable,     // analysis op needs a non-trivial mechanism
  kInfeasible,      // no incentive-compatible mechanism exists
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "InvalidInput";
    case ErrorKind::kDomainError: return "DomainError";
    case ErrorKind::kUnsupported: return "Unsupported";
    case ErrorKind::kNonFinite: return "NonFinite";
    case ErrorKind::kBudgetExceeded: return "BudgetExceeded";
    case ErrorKind::kNoBracket: return "NoBracket";
    case ErrorKind::kNotValuable: return "NotValuable";
    case ErrorKind::kInfeasible: return "Infeasible";
  }
  return "Unknown";
}

/// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures of the numerical machinery rather than of the input.
  bool is_numerical() const noexcept {
    return kind_ == ErrorKind::kNonFinite || kind_ == ErrorKind::kBudgetExceeded ||
           kind_ == ErrorKind::kNoBracket;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorKind::kInvalidInput, message);
}

}  // namespace vetomech
