#pragma once

#include <stdexcept>
#include <string>

namespace prlab {

enum class ErrorCode {
  NonFinite,
  GridMismatch,
  InvalidArgument,
  UnderResolved,
  WindowViolation,
  SupportViolation,
  CflViolation,
  BlowUp,
  Schema,
  Io,
  Format,
  VersionMismatch,
};

const char* error_code_name(ErrorCode code);

/// Every refusal in the library is raised as this exception.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace prlab
