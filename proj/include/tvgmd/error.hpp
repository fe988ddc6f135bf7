#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tvgmd {

enum class ErrorKind {
  NonFiniteInput,
  BadDimensions,
  BadParameter,
  DimensionMismatch,
  BadLength,
  NegativeWeight,
  SolveFailure,
  DegenerateInput,
  NyquistViolation,
  ParseError,
  EmptyFile,
  IoError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFiniteInput: return "NonFiniteInput";
    case ErrorKind::BadDimensions: return "BadDimensions";
    case ErrorKind::BadParameter: return "BadParameter";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BadLength: return "BadLength";
    case ErrorKind::NegativeWeight: return "NegativeWeight";
    case ErrorKind::SolveFailure: return "SolveFailure";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::NyquistViolation: return "NyquistViolation";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tvgmd
