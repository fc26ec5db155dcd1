#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swarmhydro {

enum class ErrorCode {
  DomainError,
  DivergentIntegral,
  NoRoot,
  NoBracket,
  SingularForce,
  NonFinite,
  NotApplicable,
  OutOfScope,
  ZeroMass,
  JacobianCollapse,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace swarmhydro
