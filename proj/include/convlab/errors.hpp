#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace convlab {

enum class ErrorCode {
  invalid_coefficients,
  invalid_argument,
  invalid_grid,
  grid_mismatch,
  invalid_order,
  convergence_failure,
  mass_too_large,
  not_converged,
  decay_guard,
  ceiling_violated,
  io_error,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_coefficients: return "InvalidCoefficients";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::invalid_grid: return "InvalidGrid";
    case ErrorCode::grid_mismatch: return "GridMismatch";
    case ErrorCode::invalid_order: return "InvalidOrder";
    case ErrorCode::convergence_failure: return "ConvergenceFailure";
    case ErrorCode::mass_too_large: return "MassTooLarge";
    case ErrorCode::not_converged: return "NotConverged";
    case ErrorCode::decay_guard: return "DecayGuard";
    case ErrorCode::ceiling_violated: return "CeilingViolated";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// An iterative solve that stopped without meeting its contract. The partial
/// result (last iterate plus its report) travels with the exception so callers
/// can still emit diagnostics.
template <class Payload>
class SolveError : public Error {
 public:
  SolveError(ErrorCode code, const std::string& what, Payload payload)
      : Error(code, what), payload_(std::move(payload)) {}

  const Payload& payload() const noexcept { return payload_; }

 private:
  Payload payload_;
};

}  // namespace convlab
