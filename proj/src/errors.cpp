#include "errors.hpp"

namespace llt {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNegativeMass: return "NegativeMass";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kEmptySupport: return "EmptySupport";
    case ErrorCode::kNonpositiveScale: return "NonpositiveScale";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kSupportOverflow: return "SupportOverflow";
    case ErrorCode::kRegimeViolation: return "RegimeViolation";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kDimensionUnsupported: return "DimensionUnsupported";
    case ErrorCode::kToleranceUnreachable: return "ToleranceUnreachable";
    case ErrorCode::kZeroDensityOnBox: return "ZeroDensityOnBox";
    case ErrorCode::kEmptyRegion: return "EmptyRegion";
    case ErrorCode::kDensityNotBoundedBelow: return "DensityNotBoundedBelow";
    case ErrorCode::kMinLengthExceedsBox: return "MinLengthExceedsBox";
    case ErrorCode::kNotEnoughGridPoints: return "NotEnoughGridPoints";
    case ErrorCode::kBoundDegenerate: return "BoundDegenerate";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace llt
