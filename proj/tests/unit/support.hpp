#pragma once

#include <functional>
#include <optional>

#include "swarmhydro/error.hpp"

namespace testing {

// Code of the swarmhydro::Error thrown by f, or nullopt when nothing is thrown.
inline std::optional<swarmhydro::ErrorCode> thrown_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const swarmhydro::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace testing
