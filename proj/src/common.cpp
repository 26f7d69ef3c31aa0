#include <cmath>
#include <string>

#include "kerrsim/error.hpp"
#include "kerrsim/params.hpp"

namespace kerrsim {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::no_bistability: return "no-bistability";
    case ErrorCode::pole: return "pole";
    case ErrorCode::precision: return "precision";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::degenerate_null_space: return "degenerate-null-space";
    case ErrorCode::stiffness: return "stiffness";
    case ErrorCode::truncation: return "truncation";
    case ErrorCode::grid_budget: return "grid-budget";
    case ErrorCode::state_invalid: return "state-invalid";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

void ModelParams::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorCode::invalid_parameter, msg);
  };
  require(std::isfinite(delta), "delta must be finite");
  require(std::isfinite(kappa) && kappa > 0.0, "kappa must be > 0");
  require(std::isfinite(u) && u >= 0.0, "u must be >= 0");
  require(std::isfinite(epsilon) && epsilon >= 0.0, "epsilon must be >= 0");
  require(std::isfinite(N) && N >= 1.0, "N must be >= 1");
}

}  // namespace kerrsim
