#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace qnil {

enum class ErrorCode {
  NoPositiveCoordinate,
  SupportOverflow,
  DimensionMismatch,
  ZeroPatternViolation,
  BadWordIndex,
  BudgetExceeded,
  InvalidSeed,
  ConstantTermPresent,
  HypothesisRefuted,
  NotPositive,
  InvalidArgument,
  ParseError,
  UnknownOperatorKind,
  DanglingReference,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Matrix position for ZeroPatternViolation / positivity failures.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> position;
  /// Deepest fully completed depth for BudgetExceeded.
  int completed_depth = 0;
  /// Offending tuple member (1-based) for NotPositive.
  std::optional<std::size_t> member;

 private:
  ErrorCode code_;
};

}  // namespace qnil
