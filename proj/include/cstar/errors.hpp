#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cstar {

enum class ErrorCode {
  NotHermitian,
  NotPositive,
  SyntaxError,
  IndexOutOfRange,
  GeneratorMismatch,
  DimensionMismatch,
  EmptyFamily,
  TraceObstruction,
  SymbolicSqrtUnsupported,
  NotContractive,
  MaxIterExceeded,
  SizeLimitExceeded,
  InvalidArgument,
  FormatError,
  IoError,
};

/// Stable machine-readable name, used verbatim in CLI reports.
constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::GeneratorMismatch: return "GeneratorMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyFamily: return "EmptyFamily";
    case ErrorCode::TraceObstruction: return "TraceObstruction";
    case ErrorCode::SymbolicSqrtUnsupported: return "SymbolicSqrtUnsupported";
    case ErrorCode::NotContractive: return "NotContractive";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::SizeLimitExceeded: return "SizeLimitExceeded";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure in the star-polynomial expression grammar; `position` is a byte offset.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& message)
      : Error(ErrorCode::SyntaxError, message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Raised by witness construction when the candidate family has t0 >= 1.
class TraceObstruction : public Error {
 public:
  explicit TraceObstruction(double t0)
      : Error(ErrorCode::TraceObstruction,
              "candidate family has t0 = " + std::to_string(t0) + " >= 1"),
        t0_(t0) {}

  double t0() const noexcept { return t0_; }

 private:
  double t0_;
};

}  // namespace cstar
