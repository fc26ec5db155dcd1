#include "swarmhydro/error.hpp"

namespace swarmhydro {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DivergentIntegral: return "DivergentIntegral";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::SingularForce: return "SingularForce";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::OutOfScope: return "OutOfScope";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::JacobianCollapse: return "JacobianCollapse";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace swarmhydro
