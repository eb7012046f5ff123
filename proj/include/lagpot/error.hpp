#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lagpot {

enum class ErrorCode {
  NonSymmetric,
  NoConvergence,
  DimensionTooLarge,
  IndexOutOfRange,
  NotInterior,
  FramePairingFailed,
  NotAViolation,
  DegenerateBasis,
  ZeroGradient,
  ProbeOffBoundary,
  ShellEmpty,
  EmptyInterior,
  NotConverged,
  NegativePsi,
  SyntaxError,
  UnknownIdentifier,
  ArityError,
  EvaluationError,
  InvalidArgument,
  ConfigError,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// True for errors caused by malformed input (parse/schema) rather than a
/// failed computation on validated input.
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lagpot
