#pragma once

#include <vector>

#include "kerrsim/params.hpp"
#include "kerrsim/types.hpp"

namespace kerrsim {

/// d(alpha)/dt = -(kappa + i delta + i u |alpha|^2) alpha + epsilon.
Complex mf_flow(Complex alpha, const ModelParams& p);

/// Edges of the mean-field bistability window.
///
/// The two turning points of eps(n) are reported sorted by pump value, each
/// with the photon number at which it occurs. For the usual parameters the
/// larger root of the quadratic sits on the lower edge.
struct BistabilityEdges {
  double eps_lo = 0.0;
  double eps_hi = 0.0;
  double n_at_lo = 0.0;
  double n_at_hi = 0.0;
};

/// Throws no_bistability unless delta < -sqrt(3) kappa (equality gives a
/// degenerate window) and u > 0.
BistabilityEdges bistability_edges(const ModelParams& p);

struct MeanFieldResult {
  std::vector<double> n;         // |alpha|^2, ascending
  std::vector<Complex> alpha;
  std::vector<bool> stable;
};

/// Real non-negative roots of n [kappa^2 + (delta + u n)^2] = eps^2 and their
/// linear stability. Only p.delta, p.kappa and p.u are used.
MeanFieldResult mf_steady_states(double eps, const ModelParams& p);

/// Eigenvalues of the flow linearized in (alpha, conj(alpha)) around a fixed point.
std::pair<Complex, Complex> mf_jacobian_eigenvalues(Complex alpha, const ModelParams& p);

struct CriticalPumpOptions {
  double fd_step = 1e-3;
  double tolerance = 1e-3;
  int scan_points = 96;
};

/// Pump at which the exact |<a>|/sqrt(N) has maximal slope, searched inside
/// the bistability window. Propagates precision errors from the exact
/// moment evaluation.
double critical_pump(const ModelParams& p, double N, const CriticalPumpOptions& opt = {});

}  // namespace kerrsim
