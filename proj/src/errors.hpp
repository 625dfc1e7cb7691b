#pragma once

#include <stdexcept>
#include <string>

namespace levelrepair {

// Numeric values are part of the C API (see levelrepair.h) and must stay stable.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kIoError = 2,
  kConfigError = 3,
  kUnknownGlyph = 4,
  kRaggedRows = 5,
  kEmptyInput = 6,
  kEmptyCorpus = 7,
  kCorpusParseError = 8,
  kUnknownVarId = 9,
  kDimensionMismatch = 10,
  kNumericalFailure = 11,
  kExternalSolverUnavailable = 12,
  kSolutionParseError = 13,
  kInfeasibleReported = 14,
  kConfigMismatch = 15,
  kNonUniqueAssignment = 16,
  kGridTooSmall = 17,
  kEndpointMissing = 18,
  kEndpointNotUnique = 19,
  kBadFrequencies = 20,
  kKTooLarge = 21,
  kSolverFailed = 22,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the leading code name.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace levelrepair
