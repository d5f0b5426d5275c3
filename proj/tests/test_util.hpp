#pragma once

#include <optional>
#include <string>

#include "rsbarrier/errors.hpp"

namespace rsbtest {

// Kind of the rsb::Error thrown by f, or nullopt when nothing is thrown.
template <class F>
std::optional<rsb::ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const rsb::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline std::string source_path(const std::string& rel) { return std::string(RSB_SOURCE_DIR) + "/" + rel; }

}  // namespace rsbtest
