#include "gforge/error.hpp"
#include "gforge/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace gforge {

const char* errc_name(Errc e) {
  switch (e) {
    case Errc::MissingDataset: return "MissingDataset";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::SymmetryViolation: return "SymmetryViolation";
    case Errc::NonPositiveOverlap: return "NonPositiveOverlap";
    case Errc::SumRuleViolation: return "SumRuleViolation";
    case Errc::IoFailure: return "IoFailure";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::TooLarge: return "TooLarge";
    case Errc::TooManyModes: return "TooManyModes";
    case Errc::WidthMismatch: return "WidthMismatch";
    case Errc::NonSymmetricInput: return "NonSymmetricInput";
    case Errc::MissingFactorization: return "MissingFactorization";
    case Errc::AllZero: return "AllZero";
    case Errc::EtaTooLarge: return "EtaTooLarge";
    case Errc::StepTooLarge: return "StepTooLarge";
    case Errc::NoFeasibleM: return "NoFeasibleM";
    case Errc::AssumptionViolated: return "AssumptionViolated";
    case Errc::DivergentRecycle: return "DivergentRecycle";
    case Errc::ZeroPosition: return "ZeroPosition";
    case Errc::BlowUp: return "BlowUp";
    case Errc::BoxTooSmall: return "BoxTooSmall";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_validation_error(Errc e) {
  switch (e) {
    case Errc::MissingDataset:
    case Errc::ShapeMismatch:
    case Errc::SymmetryViolation:
    case Errc::NonPositiveOverlap:
    case Errc::SumRuleViolation:
    case Errc::IoFailure:
    case Errc::IndexOutOfRange:
    case Errc::WidthMismatch:
    case Errc::InvalidArgument:
      return true;
    default:
      return false;
  }
}

double eightfold_violation(const Tensor4& t) {
  const int n = t.n;
  double worst = 0.0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = t(p, q, r, s);
          worst = std::max({worst, std::abs(v - t(q, p, r, s)),
                            std::abs(v - t(p, q, s, r)),
                            std::abs(v - t(r, s, p, q))});
        }
  return worst;
}

}  // namespace gforge
