#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lbreg {

enum class ErrorKind {
  Parse,
  Io,
  DegenerateInput,
  MissingConnectivity,
  DimensionMismatch,
  SizeLimitExceeded,
  ConvergenceFailure,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind is
/// what callers (and the CLI exit-code mapping) dispatch on.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

#define LBREG_DEFINE_ERROR(Name, Kind)                                    \
  class Name : public Error {                                             \
  public:                                                                 \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

LBREG_DEFINE_ERROR(ParseError, Parse)
LBREG_DEFINE_ERROR(IoError, Io)
LBREG_DEFINE_ERROR(DegenerateInput, DegenerateInput)
LBREG_DEFINE_ERROR(MissingConnectivity, MissingConnectivity)
LBREG_DEFINE_ERROR(DimensionMismatch, DimensionMismatch)
LBREG_DEFINE_ERROR(SizeLimitExceeded, SizeLimitExceeded)
LBREG_DEFINE_ERROR(ConvergenceFailure, ConvergenceFailure)

#undef LBREG_DEFINE_ERROR

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::MissingConnectivity: return "MissingConnectivity";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SizeLimitExceeded: return "SizeLimitExceeded";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
  }
  return "Error";
}

}  // namespace lbreg
