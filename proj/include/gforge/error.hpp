#pragma once

#include <stdexcept>
#include <string>

namespace gforge {

enum class Errc {
  MissingDataset,
  ShapeMismatch,
  SymmetryViolation,
  NonPositiveOverlap,
  SumRuleViolation,
  IoFailure,
  IndexOutOfRange,
  TooLarge,
  TooManyModes,
  WidthMismatch,
  NonSymmetricInput,
  MissingFactorization,
  AllZero,
  EtaTooLarge,
  StepTooLarge,
  NoFeasibleM,
  AssumptionViolated,
  DivergentRecycle,
  ZeroPosition,
  BlowUp,
  BoxTooSmall,
  InvalidArgument,
};

const char* errc_name(Errc e);

// Input/format problems vs. failures inside a computation; the CLI maps
// these to exit codes 2 and 3.
bool is_validation_error(Errc e);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace gforge
