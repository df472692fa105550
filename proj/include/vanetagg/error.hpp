#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vanetagg {

enum class ErrorCode {
  kZeroInverse,
  kDuplicateAbscissa,
  kThresholdTooClose,
  kInvalidArgument,
  kInvalidRequest,
  kIdCollision,
  kInsufficientFractions,
  kDuplicateReplier,
  kGammaCollision,
  kAssemblyFailed,
  kMalformedPacket,
  kDomainError,
  kConfigError,
  kCryptoFailure,
  kIoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI exit path) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace vanetagg
