#pragma once

#include <stdexcept>
#include <string>

namespace easytool {

enum class ErrorCode {
  UnrecognizedFormat,
  MalformedDocument,
  MissingField,
  ProviderError,
  DescriptionRejected,
  GuidelineRejected,
  InstructionIncomplete,
  DomainError,
  DimensionMismatch,
  ZeroVector,
  IndexBuildError,
  PlanningFailed,
  SelectionFailed,
  NoCandidatesLeft,
  EmptyInput,
  MissingGold,
  UsageError,
  ConfigError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnrecognizedFormat: return "UnrecognizedFormat";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::DescriptionRejected: return "DescriptionRejected";
    case ErrorCode::GuidelineRejected: return "GuidelineRejected";
    case ErrorCode::InstructionIncomplete: return "InstructionIncomplete";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::IndexBuildError: return "IndexBuildError";
    case ErrorCode::PlanningFailed: return "PlanningFailed";
    case ErrorCode::SelectionFailed: return "SelectionFailed";
    case ErrorCode::NoCandidatesLeft: return "NoCandidatesLeft";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingGold: return "MissingGold";
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace easytool
