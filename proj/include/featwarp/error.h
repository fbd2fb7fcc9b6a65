#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace featwarp {

enum class ErrorCode {
  // configuration
  ConfigError,
  InvalidParams,
  InvalidGroups,
  UnknownLoss,
  UnknownFeature,
  // data
  ParseError,
  IoError,
  SchemaMismatch,
  ConstantColumn,
  EmptyData,
  TooFewDistinctValues,
  // numeric
  NotSymmetric,
  NoConvergence,
  RankDeficient,
  NearCollinear,
  DegeneratePath,
  CalibrationFailed,
};

std::string_view to_string(ErrorCode code);

// Process exit code for a failure: 2 config, 3 data, 4 numeric.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace featwarp
