#include "rsbarrier/errors.hpp"

namespace rsb {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Pole: return "pole error";
    case ErrorKind::InvalidModel: return "invalid model";
    case ErrorKind::InfeasibleHistory: return "infeasible history";
    case ErrorKind::InvalidTransition: return "invalid transition";
    case ErrorKind::Resource: return "resource error";
    case ErrorKind::Degenerate: return "factorization degenerate";
    case ErrorKind::Internal: return "internal error";
    case ErrorKind::Contour: return "contour error";
    case ErrorKind::Grid: return "grid error";
    case ErrorKind::IllPosed: return "ill-posed application";
    case ErrorKind::SpectralParameter: return "spectral-parameter error";
    case ErrorKind::ContractionFailure: return "contraction failure";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::AccelerationBreakdown: return "acceleration breakdown";
    case ErrorKind::Plan: return "plan error";
    case ErrorKind::Config: return "config error";
  }
  return "error";
}

Error::Error(ErrorKind kind, std::string module, const std::string& what)
    : std::runtime_error(module + ": " + to_string(kind) + ": " + what),
      kind_(kind),
      module_(std::move(module)),
      detail_(what) {}

bool Error::is_config_error() const noexcept {
  switch (kind_) {
    case ErrorKind::Config:
    case ErrorKind::InvalidModel:
    case ErrorKind::InfeasibleHistory:
    case ErrorKind::InvalidTransition:
    case ErrorKind::Resource:
    case ErrorKind::Plan:
      return true;
    default:
      return false;
  }
}

void fail(ErrorKind kind, const char* module, const std::string& what) {
  throw Error(kind, module, what);
}

}  // namespace rsb
