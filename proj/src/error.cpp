#include "vanetagg/error.hpp"

namespace vanetagg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kZeroInverse: return "ZeroInverse";
    case ErrorCode::kDuplicateAbscissa: return "DuplicateAbscissa";
    case ErrorCode::kThresholdTooClose: return "ThresholdTooClose";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidRequest: return "InvalidRequest";
    case ErrorCode::kIdCollision: return "IdCollision";
    case ErrorCode::kInsufficientFractions: return "InsufficientFractions";
    case ErrorCode::kDuplicateReplier: return "DuplicateReplier";
    case ErrorCode::kGammaCollision: return "GammaCollision";
    case ErrorCode::kAssemblyFailed: return "AssemblyFailed";
    case ErrorCode::kMalformedPacket: return "MalformedPacket";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kCryptoFailure: return "CryptoFailure";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace vanetagg
