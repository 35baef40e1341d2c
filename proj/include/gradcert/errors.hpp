#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gradcert {

enum class ErrorCode {
  InvalidArgument,
  OddDimension,
  NotClosed,
  NotCritical,
  ZeroDenominator,
  NotPositive,
  SingularTensor,
  NotMorse,
  LinearizationNotLyapunov,
  NoPositiveRadius,
  NormalFormViolation,
  NotTransverse,
  PartitionInvalid,
  PieceInvalidOnSupport,
  Condition1Fails,
  NotOneDimensional,
  Degenerate,
  NotCloseEnough,
  NotAlmostComplex,
  NotJConvex,
  UnsupportedDim,
};

std::string_view to_string(ErrorCode code);

/// Library error. `witness()` carries the offending point (and, where
/// relevant, a direction appended after it) when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::vector<double> witness = {});

  ErrorCode code() const { return code_; }
  const std::vector<double>& witness() const { return witness_; }

 private:
  ErrorCode code_;
  std::vector<double> witness_;
};

}  // namespace gradcert
