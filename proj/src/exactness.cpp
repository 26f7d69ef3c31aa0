#include "kerrsim/exactness.hpp"

#include <cmath>
#include <numbers>

#include "kerrsim/error.hpp"

namespace kerrsim {

ExactSolutionParams ExactSolutionParams::from(const ModelParams& p) {
  const Complex iU = I * p.interaction();
  return {2.0 * p.pump() / iU, 2.0 * Complex(p.kappa, p.delta) / iU};
}

double ExactSolutionParams::series_argument() const { return 2.0 * std::norm(xi); }

namespace {

void require_orders(int n, int m) {
  if (n < 0 || m < 0) fail(ErrorCode::invalid_argument, "moment orders must be >= 0");
}

// Linear cavity: the steady state is the coherent state |E / (kappa + i delta)>.
Complex coherent_moment(int n, int m, const ModelParams& p) {
  const Complex alpha = p.pump() / Complex(p.kappa, p.delta);
  return std::pow(std::conj(alpha), n) * std::pow(alpha, m);
}

}  // namespace

Complex raw_moment(int n, int m, const ModelParams& p) {
  require_orders(n, m);
  p.validate();
  if (p.u == 0.0) return std::numbers::sqrt2 * coherent_moment(n, m, p);
  const ExactSolutionParams e = ExactSolutionParams::from(p);
  const Complex xc = std::conj(e.x);
  // Gamma(xc) Gamma(x) / (Gamma(xc + n) Gamma(x + m)) = 1 / ((xc)_n (x)_m).
  const Complex prefactor =
      std::numbers::sqrt2 * std::pow(std::conj(e.xi), n) * std::pow(e.xi, m) / (pochhammer(xc, n) * pochhammer(e.x, m));
  if (n == 0 && m == 0) return prefactor;
  if (prefactor == Complex(0.0)) return 0.0;
  const HyperRatio r = hyper0F2_ratio(xc + static_cast<double>(n), e.x + static_cast<double>(m), xc, e.x, e.series_argument());
  return prefactor * r.value;
}

Complex exact_moment(int n, int m, const ModelParams& p) {
  return raw_moment(n, m, p) / raw_moment(0, 0, p);
}

}  // namespace kerrsim
