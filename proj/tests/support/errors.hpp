#pragma once

#include <optional>

#include "pgsos/error.hpp"

namespace oracle {

/// Kind of the pgsos::Error thrown by f, or nullopt if it returned.
template <class F>
std::optional<pgsos::ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const pgsos::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace oracle
