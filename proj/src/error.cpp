#include "jante/error.hpp"

namespace jante {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyConfiguration: return "EmptyConfiguration";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InconsistentMoments: return "InconsistentMoments";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::InsufficientMass: return "InsufficientMass";
    case ErrorCode::InsufficientTailMass: return "InsufficientTailMass";
    case ErrorCode::BadInitial: return "BadInitial";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace jante
