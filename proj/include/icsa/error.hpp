#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace icsa {

enum class ErrorCode {
  InvalidMatrix,
  InvalidDimension,
  SingularScatter,
  TooFewRows,
  NotConverged,
  DegenerateRow,
  InsufficientSubsetSize,
  ShapeError,
  InvalidColumnKind,
  UndefinedNormalization,
  EmptyOutlierSet,
  SingularDesign,
  DegenerateResponse,
  UndefinedRatio,
  ConditionNotMet,
  InvalidSpec,
  IngestError,
  SchemaError,
};

std::string_view to_string(ErrorCode code);

// Numerical failures (as opposed to bad input) map to CLI exit code 3.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  // what() without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace icsa
