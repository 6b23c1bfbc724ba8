#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sqg {

enum class ErrorKind {
  NonzeroMean,
  NonConvergence,
  UnderResolved,
  InvalidGeometry,
  SingularSystem,
  TargetMiss,
  InvalidRegime,
  NoAdmissibleK,
  VelocityBlowup,
  NaNDetected,
  CheckpointIOFailure,
  DegenerateFit,
  BoxTooSmall,
  IOFailure,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonzeroMean: return "NonzeroMean";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::UnderResolved: return "UnderResolved";
    case ErrorKind::InvalidGeometry: return "InvalidGeometry";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::TargetMiss: return "TargetMiss";
    case ErrorKind::InvalidRegime: return "InvalidRegime";
    case ErrorKind::NoAdmissibleK: return "NoAdmissibleK";
    case ErrorKind::VelocityBlowup: return "VelocityBlowup";
    case ErrorKind::NaNDetected: return "NaNDetected";
    case ErrorKind::CheckpointIOFailure: return "CheckpointIOFailure";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::BoxTooSmall: return "BoxTooSmall";
    case ErrorKind::IOFailure: return "IOFailure";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace sqg
