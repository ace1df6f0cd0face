#pragma once

#include <stdexcept>
#include <string>

namespace offshell {

enum class Errc {
  InvalidArgument,
  DegenerateFifthComponent,
  LightlikeVelocity,
  OnSingularSupport,
  ComplexRoots,
  DegenerateVelocity,
  PoleOverflow,
  SingularRegimeUnsupported,
  RegimeMismatch,
  OnCone,
  BranchSingularity,
  QuadratureFailure,
  RegulatorTooSmall,
  DomainError,
  TailEstimateUnreliable,
  SingularSupportCrossed,
  StepRejected,
  StencilOnSupport,
  ConfigError,
};

constexpr const char* to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DegenerateFifthComponent: return "DegenerateFifthComponent";
    case Errc::LightlikeVelocity: return "LightlikeVelocity";
    case Errc::OnSingularSupport: return "OnSingularSupport";
    case Errc::ComplexRoots: return "ComplexRoots";
    case Errc::DegenerateVelocity: return "DegenerateVelocity";
    case Errc::PoleOverflow: return "PoleOverflow";
    case Errc::SingularRegimeUnsupported: return "SingularRegimeUnsupported";
    case Errc::RegimeMismatch: return "RegimeMismatch";
    case Errc::OnCone: return "OnCone";
    case Errc::BranchSingularity: return "BranchSingularity";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::RegulatorTooSmall: return "RegulatorTooSmall";
    case Errc::DomainError: return "DomainError";
    case Errc::TailEstimateUnreliable: return "TailEstimateUnreliable";
    case Errc::SingularSupportCrossed: return "SingularSupportCrossed";
    case Errc::StepRejected: return "StepRejected";
    case Errc::StencilOnSupport: return "StencilOnSupport";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library. `code()` identifies the condition;
/// `what()` carries a human-readable diagnostic.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace offshell
