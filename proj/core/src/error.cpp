#include "jolopt/error.hpp"

namespace jolopt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kScheduleInvalid: return "SCHEDULE_INVALID";
    case ErrorCode::kConstantsInvalid: return "CONSTANTS_INVALID";
    case ErrorCode::kDimMismatch: return "DIM_MISMATCH";
    case ErrorCode::kRegionInvalid: return "REGION_INVALID";
    case ErrorCode::kInfeasibleRegion: return "INFEASIBLE_REGION";
    case ErrorCode::kNoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::kNonfiniteGradient: return "NONFINITE_GRADIENT";
    case ErrorCode::kConfigInvalid: return "CONFIG_INVALID";
    case ErrorCode::kInstanceInvalid: return "INSTANCE_INVALID";
    case ErrorCode::kWeightsInvalid: return "WEIGHTS_INVALID";
    case ErrorCode::kAllExcluded: return "ALL_EXCLUDED";
    case ErrorCode::kZeroObjective: return "ZERO_OBJECTIVE";
    case ErrorCode::kRefInvalid: return "REF_INVALID";
    case ErrorCode::kSpecInvalid: return "SPEC_INVALID";
    case ErrorCode::kMissingCell: return "MISSING_CELL";
    case ErrorCode::kBadHeader: return "BAD_HEADER";
    case ErrorCode::kNonPositivePrice: return "NON_POSITIVE_PRICE";
    case ErrorCode::kIrregularTimestamps: return "IRREGULAR_TIMESTAMPS";
    case ErrorCode::kNegativeCapacity: return "NEGATIVE_CAPACITY";
    case ErrorCode::kIoError: return "IO_ERROR";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace jolopt
