#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jolopt {

enum class ErrorCode {
  kScheduleInvalid,
  kConstantsInvalid,
  kDimMismatch,
  kRegionInvalid,
  kInfeasibleRegion,
  kNoConvergence,
  kNonfiniteGradient,
  kConfigInvalid,
  kInstanceInvalid,
  kWeightsInvalid,
  kAllExcluded,
  kZeroObjective,
  kRefInvalid,
  kSpecInvalid,
  kMissingCell,
  kBadHeader,
  kNonPositivePrice,
  kIrregularTimestamps,
  kNegativeCapacity,
  kIoError,
};

/// Upper-snake identifier used in diagnostics, e.g. "SCHEDULE_INVALID".
std::string_view to_string(ErrorCode code);

/// Every failure surfaced by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace jolopt
