#include "kerrsim/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kerrsim/error.hpp"

namespace kerrsim {

namespace {

constexpr long kBlock = 1024;
constexpr double kBorderFraction = 1e-9;

double quadrature_tail_guard(const DensityMatrix& rho) {
  StateTolerances tol;
  const double tail = rho.tail_population(tol.tail_width);
  if (tail > tol.tail) {
    std::ostringstream os;
    os << "Husimi evaluation needs the state inside its basis; top-" << tol.tail_width << " population is " << tail;
    fail(ErrorCode::truncation, os.str());
  }
  return tail;
}

}  // namespace

int PhaseGrid::half_count() const { return static_cast<int>(std::ceil(half_width / spacing - 1e-12)); }

Complex PhaseGrid::point(int j, int k) const {
  const int K = half_count();
  return center + Complex(spacing * (j - K), spacing * (k - K));
}

Complex HusimiField::point(long idx) const {
  const int side = grid.side();
  return grid.point(static_cast<int>(idx % side), static_cast<int>(idx / side));
}

PhaseGrid initial_grid(const DensityMatrix& rho, double spacing) {
  if (!(spacing > 0.0)) fail(ErrorCode::invalid_argument, "grid spacing must be > 0");
  PhaseGrid g;
  g.center = rho.mean_a();
  g.half_width = std::max(5.0, 1.5 * std::sqrt(std::max(0.0, rho.mean_n())) + 4.0);
  g.spacing = spacing;
  return g;
}

HusimiField husimi_field(const DensityMatrix& rho, const PhaseGrid& grid) {
  if (!(grid.spacing > 0.0) || !(grid.half_width > 0.0)) fail(ErrorCode::invalid_argument, "invalid phase grid");
  quadrature_tail_guard(rho);
  const int d = rho.dim();
  const long total = grid.size();
  const int side = grid.side();
  HusimiField f;
  f.grid = grid;
  f.Q.assign(total, 0.0);
  f.A.assign(total, Complex(0.0));
  RVector sqrt_n(d);
  for (int n = 0; n < d; ++n) sqrt_n(n) = std::sqrt(static_cast<double>(n));
  const CMatrix& R = rho.matrix();
  const long blocks = (total + kBlock - 1) / kBlock;

#pragma omp parallel
  {
    CMatrix C(d, kBlock), W(d, kBlock);
#pragma omp for schedule(static)
    for (long b = 0; b < blocks; ++b) {
      const long start = b * kBlock;
      const long count = std::min(kBlock, total - start);
      for (long p = 0; p < count; ++p) {
        const long idx = start + p;
        const Complex mu = grid.point(static_cast<int>(idx % side), static_cast<int>(idx / side));
        Complex c = std::exp(-0.5 * std::norm(mu));
        C(0, p) = c;
        for (int n = 1; n < d; ++n) {
          c *= mu / sqrt_n(n);
          C(n, p) = c;
        }
      }
      W.leftCols(count).noalias() = R * C.leftCols(count);
      for (long p = 0; p < count; ++p) {
        double q = 0.0;
        Complex a = 0.0;
        for (int n = 0; n < d; ++n) {
          const Complex cc = std::conj(C(n, p));
          q += (cc * W(n, p)).real();
          if (n + 1 < d) a += cc * sqrt_n(n + 1) * W(n + 1, p);
        }
        f.Q[start + p] = q / std::numbers::pi;
        f.A[start + p] = a / std::numbers::pi;
      }
    }
  }

  double norm = 0.0, max_q = 0.0;
  for (double q : f.Q) {
    norm += q;
    max_q = std::max(max_q, q);
  }
  f.norm = norm * grid.weight();
  f.max_q = max_q;
  return f;
}

HusimiField adaptive_field(const DensityMatrix& rho, const GridOptions& opt) {
  PhaseGrid grid = initial_grid(rho, opt.spacing);
  while (true) {
    if (grid.size() > opt.max_points) {
      std::ostringstream os;
      os << "phase grid needs " << grid.size() << " points (budget " << opt.max_points << ")";
      fail(ErrorCode::grid_budget, os.str());
    }
    HusimiField f = husimi_field(rho, grid);
    if (std::abs(f.norm - 1.0) <= opt.norm_tolerance) return f;
    const int side = grid.side();
    double border = 0.0;
    for (int i = 0; i < side; ++i) {
      border = std::max({border, f.Q[i], f.Q[static_cast<long>(side - 1) * side + i],
                         f.Q[static_cast<long>(i) * side], f.Q[static_cast<long>(i) * side + side - 1]});
    }
    if (border > kBorderFraction * f.max_q) {
      grid.half_width *= 1.5;
    } else {
      grid.spacing *= 0.5;
    }
  }
}

PhaseGrid build_grid(const DensityMatrix& rho, const GridOptions& opt) { return adaptive_field(rho, opt).grid; }

double wehrl_entropy(const HusimiField& field) {
  double s = 0.0;
  for (double q : field.Q)
    if (q > 1e-300) s -= q * std::log(q);
  return s * field.grid.weight();
}

EntropyFlux entropy_flux(const DensityMatrix& rho, Complex alpha, double N, double kappa) {
  EntropyFlux f;
  f.phi = 2.0 * kappa * rho.mean_n();
  f.phi_ext = 2.0 * kappa * std::norm(alpha) * N;
  f.phi_q = f.phi - f.phi_ext;
  return f;
}

double phase_space_flux(const HusimiField& field, double kappa) {
  double s = 0.0;
  for (long i = 0; i < static_cast<long>(field.Q.size()); ++i) s += (std::conj(field.point(i)) * field.A[i]).real();
  return 2.0 * kappa * s * field.grid.weight();
}

double pi_J(const HusimiField& field, double kappa) {
  const double cut = kLowQCut * field.max_q;
  double s = 0.0;
  for (std::size_t i = 0; i < field.Q.size(); ++i)
    if (field.Q[i] >= cut && field.Q[i] > 0.0) s += std::norm(field.A[i]) / field.Q[i];
  return 2.0 * kappa * s * field.grid.weight();
}

SplitProduction pi_d(const HusimiField& field, Complex alpha, double N, double kappa) {
  const double cut = kLowQCut * field.max_q;
  const Complex shift = std::sqrt(N) * alpha;
  double s = 0.0;
  for (std::size_t i = 0; i < field.Q.size(); ++i)
    if (field.Q[i] >= cut && field.Q[i] > 0.0) s += std::norm(field.A[i] - shift * field.Q[i]) / field.Q[i];
  return {2.0 * kappa * std::norm(alpha) * N, 2.0 * kappa * s * field.grid.weight()};
}

double pi_U(const HusimiField& field, double U) {
  if (U == 0.0) return 0.0;
  const double cut = kLowQCut * field.max_q;
  double s = 0.0;
  for (long i = 0; i < static_cast<long>(field.Q.size()); ++i) {
    const Complex mu = field.point(i);
    const Complex mb = std::conj(mu);
    const Complex A = field.A[i];
    const double q = field.Q[i];
    s -= 2.0 * std::norm(mu) * (mb * A).imag();
    if (q >= cut && q > 0.0) s += (mb * mb * A * A).imag() / q;
  }
  return U * s * field.grid.weight();
}

EntropyRecord instantaneous_entropy(const DensityMatrix& rho, const ModelParams& p, const GridOptions& opt) {
  const HusimiField field = adaptive_field(rho, opt);
  const Complex alpha = rho.mean_a() / std::sqrt(p.N);
  EntropyRecord r;
  r.s_q = wehrl_entropy(field);
  r.pi_j = pi_J(field, p.kappa);
  const SplitProduction split = pi_d(field, alpha, p.N, p.kappa);
  r.pi_ext = split.pi_ext;
  r.pi_d = split.pi_d;
  r.pi_u = pi_U(field, p.interaction());
  const EntropyFlux flux = entropy_flux(rho, alpha, p.N, p.kappa);
  r.phi = flux.phi;
  r.phi_ext = flux.phi_ext;
  r.phi_q = flux.phi_q;
  r.norm = field.norm;
  r.grid_points = field.grid.size();
  r.balance_residual = std::numeric_limits<double>::quiet_NaN();
  return r;
}

EntropyRecord entropy_record(const DensityMatrix& before, const DensityMatrix& mid, const DensityMatrix& after,
                             double dt, const ModelParams& p, const GridOptions& opt) {
  if (!(dt > 0.0)) fail(ErrorCode::invalid_argument, "dt must be > 0");
  EntropyRecord r = instantaneous_entropy(mid, p, opt);
  const double s_before = wehrl_entropy(adaptive_field(before, opt));
  const double s_after = wehrl_entropy(adaptive_field(after, opt));
  const double dsdt = (s_after - s_before) / (2.0 * dt);
  r.balance_residual = std::abs(dsdt - (r.pi_u + r.pi_j - r.phi));
  return r;
}

void fill_balance_residuals(std::vector<EntropyRecord>& records, double dt) {
  const std::size_t n = records.size();
  if (n < 3) {
    for (auto& r : records) r.balance_residual = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double dsdt;
    if (i == 0) {
      dsdt = (-3.0 * records[0].s_q + 4.0 * records[1].s_q - records[2].s_q) / (2.0 * dt);
    } else if (i + 1 == n) {
      dsdt = (3.0 * records[n - 1].s_q - 4.0 * records[n - 2].s_q + records[n - 3].s_q) / (2.0 * dt);
    } else {
      dsdt = (records[i + 1].s_q - records[i - 1].s_q) / (2.0 * dt);
    }
    auto& r = records[i];
    r.balance_residual = std::abs(dsdt - (r.pi_u + r.pi_j - r.phi));
  }
}

}  // namespace kerrsim
