#pragma once

#include <Eigen/Dense>

#include "kerrsim/state.hpp"
#include "kerrsim/types.hpp"

namespace kerrsim {

/// First and second moments of one mode. The quadrature covariance uses
/// x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)), so vacuum has
/// sigma = identity / 2.
struct GaussianMoments {
  Complex mean = 0.0;      // <a>
  double n_exp = 0.0;      // <a^dag a>
  Complex a2 = 0.0;        // <a^2>
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity() / 2.0;
  double nu_s = 0.5;       // sqrt(det sigma)
};

/// Throws state_invalid when nu_s < 1/2 beyond tolerance (truncation damage).
GaussianMoments second_moments(const DensityMatrix& rho);

/// -tr rho ln rho over eigenvalues > 1e-14. Eigenvalues in [-1e-8, 0) are
/// treated as zero; anything more negative is a positivity error.
double von_neumann_entropy(const DensityMatrix& rho);

/// Entropy of a single-mode Gaussian state with symplectic eigenvalue nu:
/// (nu + 1/2) ln(nu + 1/2) - (nu - 1/2) ln(nu - 1/2).
double gaussian_entropy(double nu);

struct NonGaussianity {
  double value = 0.0;  // max(raw, 0)
  double raw = 0.0;
};

/// Relative entropy to the Gaussian state with the same first and second
/// moments, via S(rho_G) - S(rho).
NonGaussianity non_gaussianity(const DensityMatrix& rho);

}  // namespace kerrsim
