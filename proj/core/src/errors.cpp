#include "mixtype/errors.hpp"

namespace mixtype {

std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Expression: return "ExpressionError";
    case ErrorKind::TransversalityViolation: return "TransversalityViolation";
    case ErrorKind::CoverageError: return "CoverageError";
    case ErrorKind::OrientationFailure: return "OrientationFailure";
    case ErrorKind::MaskTooThin: return "MaskTooThin";
    case ErrorKind::DivisionByDegeneracy: return "DivisionByDegeneracy";
    case ErrorKind::SolverDivergence: return "SolverDivergence";
    case ErrorKind::MaximumPrincipleViolation: return "MaximumPrincipleViolation";
    case ErrorKind::ContinuationStall: return "ContinuationStall";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::CharacteristicCorner: return "CharacteristicCorner";
    case ErrorKind::IncompatibleData: return "IncompatibleData";
    case ErrorKind::SpaceLikeViolation: return "SpaceLikeViolation";
    case ErrorKind::CFLViolation: return "CFLViolation";
    case ErrorKind::InstabilityDetected: return "InstabilityDetected";
    case ErrorKind::GlueDefectExceeded: return "GlueDefectExceeded";
    case ErrorKind::TransformDegenerate: return "TransformDegenerate";
    case ErrorKind::ResidualStagnation: return "ResidualStagnation";
  }
  return "UnknownError";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Expression:
      return 2;
    case ErrorKind::TransversalityViolation:
    case ErrorKind::CoverageError:
    case ErrorKind::OrientationFailure:
      return 3;
    case ErrorKind::MaskTooThin:
    case ErrorKind::DivisionByDegeneracy:
      return 4;
    case ErrorKind::SolverDivergence:
    case ErrorKind::MaximumPrincipleViolation:
    case ErrorKind::ContinuationStall:
    case ErrorKind::SingularSystem:
      return 5;
    case ErrorKind::CharacteristicCorner:
    case ErrorKind::IncompatibleData:
      return 6;
    case ErrorKind::SpaceLikeViolation:
    case ErrorKind::CFLViolation:
    case ErrorKind::InstabilityDetected:
      return 7;
    case ErrorKind::GlueDefectExceeded:
      return 8;
    case ErrorKind::TransformDegenerate:
    case ErrorKind::ResidualStagnation:
      return 9;
  }
  return 1;
}

}  // namespace mixtype
