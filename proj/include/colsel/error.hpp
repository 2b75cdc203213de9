#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace colsel {

enum class ErrorCode {
  ZeroColumn,
  NonFinite,
  DimensionMismatch,
  NotSymmetric,
  NoConvergence,
  DimensionTooLarge,
  PoleEvaluation,
  BracketFailure,
  DegenerateRoot,
  BudgetTooSmall,
  IndexOrder,
  Exhausted,
  ColumnNormViolation,
  BadArguments,
  BadSpec,
  Parse,
  Io,
  Mismatch,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above.
// `index` is set when the failure is attributable to a single column or row.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(what), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace colsel
