#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pvfc {

enum class ErrorCode {
  InvalidArgument,
  MisalignedRange,
  LengthMismatch,
  LevelTagMismatch,
  OutOfRangeDay,
  NoNightHours,
  AllNight,
  AllExcluded,
  ConstantActual,
  DimensionMismatch,
  TooShort,
  EmptyBatch,
  DivergedLoss,
  SeedLengthMismatch,
  EmptyList,
  InsufficientHistory,
  EmptyDay,
  MissingWeatherClass,
  UnmappedCustomer,
  ParseError,
  GapError,
  DuplicateRow,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// All library failures surface as this exception; `code()` identifies the
/// contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace pvfc
