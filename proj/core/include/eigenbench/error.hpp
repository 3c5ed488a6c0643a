#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eigenbench {

enum class ErrorKind {
  invalid_input,
  dimension_mismatch,
  convergence,
  parse,
  io,
  format,
  unsupported_version,
  checksum,
  degenerate_training,
  empty_selection,
  empty_model,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid_input";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::unsupported_version: return "unsupported_version";
    case ErrorKind::checksum: return "checksum";
    case ErrorKind::degenerate_training: return "degenerate_training";
    case ErrorKind::empty_selection: return "empty_selection";
    case ErrorKind::empty_model: return "empty_model";
  }
  return "unknown";
}

/// Base exception for every failure raised by the library. The kind is
/// stable and machine-readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the eigensolver when the sweep cap is hit before the
/// off-diagonal mass drops below tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double residual)
      : Error(ErrorKind::convergence, message), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace eigenbench
