// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stabsqp {

enum class ErrorCode {
  kDimensionMismatch,
  kUnsupportedGram,
  kUnsupportedSet,
  kInvalidArgument,
  kNotPositiveDefinite,
  kNonFinite,
  kKktPoint,  // sigma(v) == 0, stabilized subproblem undefined
  kTooLarge,
  kSingular,
  kBadGrid,
  kBadAlpha,
  kInsufficientData,
  kMissingReference,
  kParse,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code. Solver outcomes (non-convergence,
/// infeasible linearizations) are reported through status enums instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kUnsupportedGram: return "UnsupportedGram";
    case ErrorCode::kUnsupportedSet: return "UnsupportedSet";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kKktPoint: return "KktPoint";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kSingular: return "Singular";
    case ErrorCode::kBadGrid: return "BadGrid";
    case ErrorCode::kBadAlpha: return "BadAlpha";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kMissingReference: return "MissingReference";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

}  // namespace stabsqp
