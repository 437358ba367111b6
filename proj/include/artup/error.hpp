#pragma once

#include <stdexcept>
#include <string>

namespace artup {

enum class ErrorCode {
  LengthViolation,
  UncorrectableBlock,
  CapacityExceeded,
  FormatInfoUnreadable,
  VersionUnsupported,
  NoPaddingAvailable,
  DimensionMismatch,
  ImageTooSmall,
  DetectFailed,
  VersionEstimateFailed,
  VerificationFailed,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorCode code);

/// Base exception for every domain failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace artup
