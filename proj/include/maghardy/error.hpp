#pragma once

#include <stdexcept>
#include <string>

namespace maghardy {

enum class ErrorCode {
  NonIntegrableField,
  QuadratureFailure,
  UnknownClass,
  DomainError,
  SupportError,
  PreconditionError,
  ParameterError,
  FluxNotInteger,
  NoTruncation,
  StiffnessFailure,
  InsufficientGrowth,
  Unbounded,
  ConfigError,
  IoError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonIntegrableField: return "NonIntegrableField";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::SupportError: return "SupportError";
    case ErrorCode::PreconditionError: return "PreconditionError";
    case ErrorCode::ParameterError: return "ParameterError";
    case ErrorCode::FluxNotInteger: return "FluxNotInteger";
    case ErrorCode::NoTruncation: return "NoTruncation";
    case ErrorCode::StiffnessFailure: return "StiffnessFailure";
    case ErrorCode::InsufficientGrowth: return "InsufficientGrowth";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Exception type thrown by every module; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace maghardy
