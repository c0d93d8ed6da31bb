#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace indefcanon {

enum class ErrorCode {
  Singular,
  NotHermitian,
  SingularH,
  NotCs,
  StructureMismatch,
  EigenvalueDrift,
  DegenerateGram,
  SingularBasis,
  PureImaginaryAnchor,
  NotUnitTriangular,
  NotReal,
  RetryExhausted,
  DeltaUnreachable,
  AmbiguousMatch,
  KindMismatch,
  InvalidSpec,
  Parse,
};

/// Upper-snake name used in messages, CSV status columns and CLI output.
constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Singular: return "SINGULAR";
    case ErrorCode::NotHermitian: return "NOT_HERMITIAN";
    case ErrorCode::SingularH: return "SINGULAR_H";
    case ErrorCode::NotCs: return "NOT_CS";
    case ErrorCode::StructureMismatch: return "STRUCTURE_MISMATCH";
    case ErrorCode::EigenvalueDrift: return "EIGENVALUE_DRIFT";
    case ErrorCode::DegenerateGram: return "DEGENERATE_GRAM";
    case ErrorCode::SingularBasis: return "SINGULAR_BASIS";
    case ErrorCode::PureImaginaryAnchor: return "PURE_IMAGINARY_ANCHOR";
    case ErrorCode::NotUnitTriangular: return "NOT_UNIT_TRIANGULAR";
    case ErrorCode::NotReal: return "NOT_REAL";
    case ErrorCode::RetryExhausted: return "RETRY_EXHAUSTED";
    case ErrorCode::DeltaUnreachable: return "DELTA_UNREACHABLE";
    case ErrorCode::AmbiguousMatch: return "AMBIGUOUS_MATCH";
    case ErrorCode::KindMismatch: return "KIND_MISMATCH";
    case ErrorCode::InvalidSpec: return "INVALID_SPEC";
    case ErrorCode::Parse: return "PARSE";
  }
  return "UNKNOWN";
}

class CanonError : public std::runtime_error {
 public:
  CanonError(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace indefcanon
