#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mixtype {

enum class ErrorKind {
  Config,
  Expression,
  TransversalityViolation,
  CoverageError,
  OrientationFailure,
  MaskTooThin,
  DivisionByDegeneracy,
  SolverDivergence,
  MaximumPrincipleViolation,
  ContinuationStall,
  SingularSystem,
  CharacteristicCorner,
  IncompatibleData,
  SpaceLikeViolation,
  CFLViolation,
  InstabilityDetected,
  GlueDefectExceeded,
  TransformDegenerate,
  ResidualStagnation,
};

std::string_view error_name(ErrorKind kind);

/// Process exit code for an error class; see `mixtype --help`.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mixtype
