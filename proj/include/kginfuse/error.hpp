#pragma once

#include <stdexcept>
#include <string>

namespace kginfuse {

// Shared error type for all load/train/score failures. The code is stable
// and machine-checkable; the message names the offending path, row, or key.
class Error : public std::runtime_error {
 public:
  enum class Code {
    IoError,
    ParseError,
    UnknownType,
    MissingType,
    MissingColumn,
    BadLabel,
    SingleClass,
    NoConvergence,
    LengthMismatch,
    EmptyInput,
    OneClassOnly,
    AllWordsMissing,
    DimensionMismatch,
  };

  Error(Code code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Code code() const { return code_; }

 private:
  Code code_;
};

inline const char* to_string(Error::Code code) {
  switch (code) {
    case Error::Code::IoError: return "IoError";
    case Error::Code::ParseError: return "ParseError";
    case Error::Code::UnknownType: return "UnknownType";
    case Error::Code::MissingType: return "MissingType";
    case Error::Code::MissingColumn: return "MissingColumn";
    case Error::Code::BadLabel: return "BadLabel";
    case Error::Code::SingleClass: return "SingleClass";
    case Error::Code::NoConvergence: return "NoConvergence";
    case Error::Code::LengthMismatch: return "LengthMismatch";
    case Error::Code::EmptyInput: return "EmptyInput";
    case Error::Code::OneClassOnly: return "OneClassOnly";
    case Error::Code::AllWordsMissing: return "AllWordsMissing";
    case Error::Code::DimensionMismatch: return "DimensionMismatch";
  }
  return "UnknownError";
}

}  // namespace kginfuse
