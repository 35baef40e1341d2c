#include "gradcert/errors.hpp"

namespace gradcert {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::NotCritical: return "NotCritical";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::SingularTensor: return "SingularTensor";
    case ErrorCode::NotMorse: return "NotMorse";
    case ErrorCode::LinearizationNotLyapunov: return "LinearizationNotLyapunov";
    case ErrorCode::NoPositiveRadius: return "NoPositiveRadius";
    case ErrorCode::NormalFormViolation: return "NormalFormViolation";
    case ErrorCode::NotTransverse: return "NotTransverse";
    case ErrorCode::PartitionInvalid: return "PartitionInvalid";
    case ErrorCode::PieceInvalidOnSupport: return "PieceInvalidOnSupport";
    case ErrorCode::Condition1Fails: return "Condition1Fails";
    case ErrorCode::NotOneDimensional: return "NotOneDimensional";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::NotCloseEnough: return "NotCloseEnough";
    case ErrorCode::NotAlmostComplex: return "NotAlmostComplex";
    case ErrorCode::NotJConvex: return "NotJConvex";
    case ErrorCode::UnsupportedDim: return "UnsupportedDim";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what, std::vector<double> witness)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code),
      witness_(std::move(witness)) {}

}  // namespace gradcert
