#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsdelay {

enum class ErrorCode {
  PointNotInScale,
  AtSupremum,
  EmptyInterval,
  OutOfDomain,
  StickyPointViolation,
  NotADelayFunction,
  InsufficientSamples,
  NotRegressive,
  ZeroValue,
  DenseSignChange,
  HistoryGap,
  NonMonotoneGrid,
  OutOfHistoryRegime,
  EmptyAlphaInterval,
  PreconditionNotVerified,
  DelayWeightTooLarge,
  ZeroB,
  NonPositiveV0,
  Syntax,
  Eval,
  Config,
  Unsupported,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above; the CLI
// maps all of them to exit status 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tsdelay
