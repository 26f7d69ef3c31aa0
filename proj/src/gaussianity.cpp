#include "kerrsim/gaussianity.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "kerrsim/error.hpp"

namespace kerrsim {

namespace {

constexpr double kUncertaintyTol = 1e-9;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

GaussianMoments second_moments(const DensityMatrix& rho) {
  GaussianMoments g;
  g.mean = rho.mean_a();
  g.n_exp = rho.mean_n();
  g.a2 = rho.mean_a2();
  const double fluct = g.n_exp - std::norm(g.mean);        // <da^dag da>
  const Complex squeeze = g.a2 - g.mean * g.mean;          // <da^2>
  g.covariance(0, 0) = fluct + 0.5 + squeeze.real();
  g.covariance(1, 1) = fluct + 0.5 - squeeze.real();
  g.covariance(0, 1) = g.covariance(1, 0) = squeeze.imag();
  const double det = g.covariance.determinant();
  g.nu_s = std::sqrt(std::max(0.0, det));
  if (g.nu_s < 0.5 - kUncertaintyTol) {
    std::ostringstream os;
    os << "covariance violates the uncertainty relation: nu_s = " << g.nu_s;
    fail(ErrorCode::state_invalid, os.str());
  }
  return g;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const CMatrix herm = 0.5 * (rho.matrix() + rho.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double w = es.eigenvalues()(i);
    if (w < -1e-8) {
      std::ostringstream os;
      os << "state has eigenvalue " << w << "; entropy undefined";
      fail(ErrorCode::state_invalid, os.str());
    }
    if (w > 1e-14) s -= w * std::log(w);
  }
  return s;
}

double gaussian_entropy(double nu) {
  if (!(nu >= 0.5 - kUncertaintyTol)) {
    std::ostringstream os;
    os << "symplectic eigenvalue " << nu << " is below 1/2";
    fail(ErrorCode::invalid_argument, os.str());
  }
  return xlogx(nu + 0.5) - xlogx(nu - 0.5);
}

NonGaussianity non_gaussianity(const DensityMatrix& rho) {
  const GaussianMoments g = second_moments(rho);
  NonGaussianity out;
  out.raw = gaussian_entropy(g.nu_s) - von_neumann_entropy(rho);
  out.value = std::max(out.raw, 0.0);
  return out;
}

}  // namespace kerrsim
