#pragma once

#include <stdexcept>
#include <string>

namespace llt {

// Numeric values match llt_status in include/llt/llt.h.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kNegativeMass,
  kNotNormalized,
  kEmptySupport,
  kNonpositiveScale,
  kZeroVariance,
  kSupportOverflow,
  kRegimeViolation,
  kSingularMatrix,
  kDimensionUnsupported,
  kToleranceUnreachable,
  kZeroDensityOnBox,
  kEmptyRegion,
  kDensityNotBoundedBelow,
  kMinLengthExceedsBox,
  kNotEnoughGridPoints,
  kBoundDegenerate,
  kConfigInvalid,
  kIo,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(error_code_name(code)) + ": " + what);
}

}  // namespace llt
