#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coresel {

enum class ErrorCode {
  InvalidArgument,
  ZeroVector,
  DimensionMismatch,
  NonFiniteEntry,
  KTooLarge,
  QueryNotInSubset,
  EmptyIndex,
  BudgetExceedsItems,
  DegenerateDistance,
  SimplexViolation,
  MissingLabels,
  DegenerateDataset,
  BadMagic,
  UnsupportedVersion,
  TruncatedFile,
  TrailingData,
  ZeroVectorRow,
  ParseError,
  SchemaViolation,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace coresel
