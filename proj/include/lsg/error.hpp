#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lsg {

enum class ErrorCode {
  NotPositiveDefinite,
  NonFinite,
  QuadratureFailure,
  NotElliptic,
  DegenerateFlow,
  RepMismatch,
  TimeClamp,
  InvalidArgument,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::NotElliptic: return "NotElliptic";
    case ErrorCode::DegenerateFlow: return "DegenerateFlow";
    case ErrorCode::RepMismatch: return "RepMismatch";
    case ErrorCode::TimeClamp: return "TimeClamp";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lsg
