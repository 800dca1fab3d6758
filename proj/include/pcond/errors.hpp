#pragma once

#include <stdexcept>
#include <string>

namespace pcond {

enum class ErrorCode {
  DisjointnessViolation,
  NonLipschitzShape,
  BadExponent,
  EmptyInclusion,
  UnboundedResult,
  MeshFailure,
  SingularSystem,
  NoConvergence,
  PeriodNotFound,
  OriginApproach,
  ScaleViolation,
  IllConditioned,
  ContractionFailure,
  FitDegenerate,
  CoincidentPoints,
  MeshResolutionExceeded,
  RegimeNotReached,
  MixedSigns,
  AssertionFailure,
  ParseError,
  ValidationError,
  IoError,
};

const char* error_code_name(ErrorCode code);

/// All recoverable failures carry a machine-readable code plus a message.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

}  // namespace pcond
