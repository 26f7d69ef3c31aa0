#pragma once

#include <vector>

#include "kerrsim/params.hpp"
#include "kerrsim/state.hpp"
#include "kerrsim/types.hpp"

namespace kerrsim {

/// Uniform square grid of midpoints mu = center + h (j + i k), |j|, |k| <= K,
/// with K = ceil(half_width / h). Quadrature weight is h^2 per point.
struct PhaseGrid {
  Complex center = 0.0;
  double half_width = 5.0;
  double spacing = 0.1;

  int half_count() const;
  int side() const { return 2 * half_count() + 1; }
  long size() const { return static_cast<long>(side()) * side(); }
  double weight() const { return spacing * spacing; }
  Complex point(int j, int k) const;  // j, k in [0, side)
};

/// Husimi function Q = <mu|rho|mu>/pi and the Bargmann element
/// A = <mu|a rho|mu>/pi on a grid, stored row-major over (k, j).
struct HusimiField {
  PhaseGrid grid;
  std::vector<double> Q;
  std::vector<Complex> A;
  double norm = 0.0;  // h^2 sum Q
  double max_q = 0.0;

  Complex point(long idx) const;
};

struct GridOptions {
  double spacing = 0.1;
  double norm_tolerance = 1e-4;
  long max_points = 10'000'000;
};

/// Initial grid from the rule center = <a>, L = max(5, 1.5 sqrt(<n>) + 4).
PhaseGrid initial_grid(const DensityMatrix& rho, double spacing = 0.1);

/// Builds the grid and the field together: starting from initial_grid, the
/// box is expanded (L *= 1.5) while Q carries mass at its border and the
/// spacing halved otherwise, until |norm - 1| <= norm_tolerance.
/// Throws grid_budget past max_points.
HusimiField adaptive_field(const DensityMatrix& rho, const GridOptions& opt = {});

/// Same, returning only the accepted grid.
PhaseGrid build_grid(const DensityMatrix& rho, const GridOptions& opt = {});

/// Q and A at every grid point. Cost O(points * d^2), evaluated in blocks as
/// a dense matrix product. Throws truncation when rho itself is not
/// contained in its basis.
HusimiField husimi_field(const DensityMatrix& rho, const PhaseGrid& grid);

/// -h^2 sum Q ln Q, with 0 ln 0 = 0 below Q = 1e-300.
double wehrl_entropy(const HusimiField& field);

struct EntropyFlux {
  double phi = 0.0;
  double phi_ext = 0.0;
  double phi_q = 0.0;
};

/// Phi = 2 kappa <a^dag a>, Phi_ext = 2 kappa |alpha|^2 N, Phi_q = Phi - Phi_ext.
EntropyFlux entropy_flux(const DensityMatrix& rho, Complex alpha, double N, double kappa);

/// Phase-space form of the flux, 2 kappa h^2 sum Re(conj(mu) A). Cross-check only.
double phase_space_flux(const HusimiField& field, double kappa);

/// Integrand exclusion for the 1/Q terms: Q < 1e-14 max Q.
inline constexpr double kLowQCut = 1e-14;

/// Pi_J = 2 kappa h^2 sum |A|^2 / Q.
double pi_J(const HusimiField& field, double kappa);

struct SplitProduction {
  double pi_ext = 0.0;
  double pi_d = 0.0;
};

/// Pi_ext = 2 kappa |alpha|^2 N and Pi_d = 2 kappa h^2 sum |A - sqrt(N) alpha Q|^2 / Q.
SplitProduction pi_d(const HusimiField& field, Complex alpha, double N, double kappa);

/// Unitary contribution U h^2 sum Im{conj(mu)^2 (d_conj(mu) Q)^2 / Q} with
/// d_conj(mu) Q = A - mu Q, i.e. Im{conj(mu)^2 A^2 / Q} - 2 |mu|^2 Im{conj(mu) A}.
double pi_U(const HusimiField& field, double U);

struct EntropyRecord {
  double s_q = 0.0;
  double pi_j = 0.0;
  double pi_ext = 0.0;
  double pi_d = 0.0;
  double pi_u = 0.0;
  double phi = 0.0;
  double phi_ext = 0.0;
  double phi_q = 0.0;
  double balance_residual = 0.0;  // |dS/dt - (Pi_U + Pi_J - Phi)|
  double norm = 0.0;              // quadrature of Q actually used
  long grid_points = 0;
};

/// Every field of EntropyRecord except balance_residual, for one state.
EntropyRecord instantaneous_entropy(const DensityMatrix& rho, const ModelParams& p, const GridOptions& opt = {});

/// Record at the middle state of three consecutive states spaced dt apart;
/// dS/dt is the central difference of the Wehrl entropy.
EntropyRecord entropy_record(const DensityMatrix& before, const DensityMatrix& mid, const DensityMatrix& after,
                             double dt, const ModelParams& p, const GridOptions& opt = {});

/// Fills balance_residual along a uniformly spaced series: central differences
/// inside, second-order one-sided differences at both ends.
void fill_balance_residuals(std::vector<EntropyRecord>& records, double dt);

}  // namespace kerrsim
