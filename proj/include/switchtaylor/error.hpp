#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace switchtaylor {

enum class ErrorCode {
  ConsecutiveJumpComponents,
  EmptyIndex,
  InvalidGamma,
  ComponentOutOfAlphabet,
  EnumerationTooLarge,
  InvalidGenerator,
  InvalidState,
  IntervalOutOfRange,
  SameStatePair,
  InvalidGrid,
  NotAGridTime,
  NonFiniteInput,
  UnsupportedWordLength,
  NonFiniteDerivative,
  NonFiniteState,
  CommutativityRequired,
  ReferenceNotFiner,
  StepTooLargeForChain,
  InsufficientLevels,
  NonPositiveError,
  InvalidPlan,
  InvalidConfig,
  UnknownModel,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. `index()` carries a position when one is meaningful:
/// the offending component for multi-index errors, the failing step for
/// integration errors.
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

}  // namespace switchtaylor
