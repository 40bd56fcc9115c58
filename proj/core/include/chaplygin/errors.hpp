#pragma once

#include <stdexcept>
#include <string>

namespace chaplygin {

enum class ErrorCode {
  NonSupersonic,
  AngleTooLarge,
  BadParameter,
  FoldedMesh,
  SubsonicState,
  InadmissibleEta,
  EmptyFamily,
  DegenerateValue,
  PointOffBoundary,
  NotUnit,
  BehindApex,
  LinearSolveFailure,
  SingularJacobian,
  Diverged,
  ContinuationStuck,
  IoFailure,
  ConfigError,
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonSupersonic: return "NonSupersonic";
    case ErrorCode::AngleTooLarge: return "AngleTooLarge";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::FoldedMesh: return "FoldedMesh";
    case ErrorCode::SubsonicState: return "SubsonicState";
    case ErrorCode::InadmissibleEta: return "InadmissibleEta";
    case ErrorCode::EmptyFamily: return "EmptyFamily";
    case ErrorCode::DegenerateValue: return "DegenerateValue";
    case ErrorCode::PointOffBoundary: return "PointOffBoundary";
    case ErrorCode::NotUnit: return "NotUnit";
    case ErrorCode::BehindApex: return "BehindApex";
    case ErrorCode::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::ContinuationStuck: return "ContinuationStuck";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace chaplygin
