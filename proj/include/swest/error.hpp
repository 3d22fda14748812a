#pragma once

#include <stdexcept>
#include <string>

namespace swest {

enum class ErrorCode {
  NonFiniteInput,
  EmptyInput,
  DimensionMismatch,
  OutOfRange,
  InvalidScale,
  NotPositiveDefinite,
  SizeMismatch,
  SizeCapExceeded,
  NoConvergence,
  ShapeMismatch,
  DegenerateSample,
  InsufficientPoints,
  NonPositive,
  NonFiniteObjective,
  ParseError,
  IoError,
  InvalidConfig,
};

const char* error_code_name(ErrorCode code);

class SwError : public std::runtime_error {
 public:
  SwError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace swest
