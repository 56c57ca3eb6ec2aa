#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace attrdisam {

enum class ErrorKind {
  InvalidArgument,
  Config,
  Schema,
  Validation,
  Domain,
  ConfigInfeasible,
  IncompatibleObservation,
  StepLimitExceeded,
  UnknownSession,
  SessionDone,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure surfaced by the core library. The kind maps one-to-one onto
/// the status codes of the C API.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace attrdisam
