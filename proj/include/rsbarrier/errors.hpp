#pragma once

#include <stdexcept>
#include <string>

namespace rsb {

enum class ErrorKind {
  Domain,
  Pole,
  InvalidModel,
  InfeasibleHistory,
  InvalidTransition,
  Resource,
  Degenerate,
  Internal,
  Contour,
  Grid,
  IllPosed,
  SpectralParameter,
  ContractionFailure,
  Divergence,
  AccelerationBreakdown,
  Plan,
  Config,
};

const char* to_string(ErrorKind kind);

// Base error for everything the library throws. `module` names the
// component so that orchestrated runs can report where a failure came from.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  // Message without the module and kind prefix.
  const std::string& detail() const noexcept { return detail_; }
  bool is_config_error() const noexcept;

 private:
  ErrorKind kind_;
  std::string module_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorKind kind, const char* module, const std::string& what);

}  // namespace rsb
