#include "kerrsim/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kerrsim/error.hpp"
#include "kerrsim/exactness.hpp"

namespace kerrsim {

Complex mf_flow(Complex alpha, const ModelParams& p) {
  return -Complex(p.kappa, p.delta + p.u * std::norm(alpha)) * alpha + p.epsilon;
}

BistabilityEdges bistability_edges(const ModelParams& p) {
  double disc = p.delta * p.delta - 3.0 * p.kappa * p.kappa;
  if (p.u <= 0.0) fail(ErrorCode::no_bistability, "bistability requires u > 0");
  if (p.delta > -std::sqrt(3.0) * p.kappa || disc < -1e-12 * p.delta * p.delta)
    fail(ErrorCode::no_bistability, "bistability requires delta < -sqrt(3) kappa");
  const double root = std::sqrt(std::max(disc, 0.0));
  const double n_plus = (-2.0 * p.delta + root) / (3.0 * p.u);
  const double n_minus = (-2.0 * p.delta - root) / (3.0 * p.u);
  auto eps_of = [&](double n) {
    const double s = p.delta + n * p.u;
    return std::sqrt(n * (p.kappa * p.kappa + s * s));
  };
  const double e_plus = eps_of(n_plus);
  const double e_minus = eps_of(n_minus);
  if (e_plus <= e_minus) return {e_plus, e_minus, n_plus, n_minus};
  return {e_minus, e_plus, n_minus, n_plus};
}

namespace {

// Residual of the stationarity condition and its derivative in n.
double cubic(double n, double eps, const ModelParams& p) {
  const double s = p.delta + p.u * n;
  return n * (p.kappa * p.kappa + s * s) - eps * eps;
}

double cubic_prime(double n, const ModelParams& p) {
  const double s = p.delta + p.u * n;
  return p.kappa * p.kappa + s * s + 2.0 * p.u * n * s;
}

double polish(double n, double eps, const ModelParams& p) {
  for (int it = 0; it < 60; ++it) {
    const double f = cubic(n, eps, p);
    const double df = cubic_prime(n, p);
    if (df == 0.0) break;
    const double step = f / df;
    n -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(n))) break;
  }
  return n;
}

// Real roots of c3 n^3 + c2 n^2 + c1 n + c0, via the trigonometric / Cardano form.
std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0) {
  const double a = c2 / c3, b = c1 / c3, c = c0 / c3;
  const double q = (a * a - 3.0 * b) / 9.0;
  const double r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
  std::vector<double> roots;
  if (r * r < q * q * q) {
    const double theta = std::acos(std::clamp(r / std::sqrt(q * q * q), -1.0, 1.0));
    const double s = -2.0 * std::sqrt(q);
    for (int k = 0; k < 3; ++k)
      roots.push_back(s * std::cos((theta + 2.0 * std::numbers::pi * k) / 3.0) - a / 3.0);
  } else {
    const double A = -std::copysign(std::cbrt(std::abs(r) + std::sqrt(r * r - q * q * q)), r);
    const double B = (A == 0.0) ? 0.0 : q / A;
    roots.push_back(A + B - a / 3.0);
    // Double root exactly at an edge.
    if (std::abs(r * r - q * q * q) <= 1e-14 * std::max(1.0, q * q * q) && A != 0.0)
      roots.push_back(-0.5 * (A + B) - a / 3.0);
  }
  return roots;
}

}  // namespace

std::pair<Complex, Complex> mf_jacobian_eigenvalues(Complex alpha, const ModelParams& p) {
  const double n = std::norm(alpha);
  // d/dt (da, da*) = M (da, da*); trace -2 kappa, det kappa^2 + (delta+2un)^2 - u^2 n^2.
  const double detuned = p.delta + 2.0 * p.u * n;
  const Complex disc = std::sqrt(Complex(p.u * p.u * n * n - detuned * detuned, 0.0));
  return {-p.kappa + disc, -p.kappa - disc};
}

MeanFieldResult mf_steady_states(double eps, const ModelParams& p) {
  if (!(eps >= 0.0)) fail(ErrorCode::invalid_parameter, "pump must be >= 0");
  MeanFieldResult out;
  std::vector<double> roots;
  if (eps == 0.0) {
    roots.push_back(0.0);
  } else if (p.u <= 0.0) {
    roots.push_back(eps * eps / (p.kappa * p.kappa + p.delta * p.delta));
  } else {
    const double c3 = p.u * p.u;
    const double c2 = 2.0 * p.delta * p.u;
    const double c1 = p.kappa * p.kappa + p.delta * p.delta;
    const double c0 = -eps * eps;
    for (double n : real_cubic_roots(c3, c2, c1, c0)) roots.push_back(std::max(0.0, polish(n, eps, p)));
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::max(1.0, y); }),
                roots.end());
  }
  for (double n : roots) {
    const Complex alpha = eps / Complex(p.kappa, p.delta + p.u * n);
    const auto [l1, l2] = mf_jacobian_eigenvalues(alpha, p);
    out.n.push_back(n);
    out.alpha.push_back(alpha);
    out.stable.push_back(l1.real() < 0.0 && l2.real() < 0.0);
  }
  return out;
}

double critical_pump(const ModelParams& p, double N, const CriticalPumpOptions& opt) {
  const BistabilityEdges edges = bistability_edges(p);
  const ModelParams base = p.with_scale(N);
  auto order = [&](double eps) { return std::abs(exact_moment(0, 1, base.with_epsilon(eps))) / std::sqrt(N); };
  auto slope = [&](double eps) { return (order(eps + opt.fd_step) - order(eps - opt.fd_step)) / (2.0 * opt.fd_step); };

  // The slope is not unimodal over the whole window (the phase of <a> winds
  // before the jump), so bracket the peak on a coarse scan first.
  const int m = std::max(8, opt.scan_points);
  const double h = (edges.eps_hi - edges.eps_lo) / m;
  int best = 0;
  double best_val = -1e300;
  for (int i = 0; i <= m; ++i) {
    const double v = slope(edges.eps_lo + i * h);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = edges.eps_lo + std::max(0, best - 1) * h;
  double hi = edges.eps_lo + std::min(m, best + 1) * h;

  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = slope(x1), f2 = slope(x2);
  while (hi - lo > opt.tolerance * 0.5) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = slope(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = slope(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace kerrsim
