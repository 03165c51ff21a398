#pragma once

#include <stdexcept>
#include <string>

namespace jante {

enum class ErrorCode {
  EmptyConfiguration,
  InvalidK,
  InconsistentMoments,
  InvalidDistribution,
  InsufficientMass,
  InsufficientTailMass,
  BadInitial,
  NotApplicable,
  InvalidArgument,
  ConfigError,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code; the CLI maps codes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace jante
