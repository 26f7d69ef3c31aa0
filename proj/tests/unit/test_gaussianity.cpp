#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "kerrsim/error.hpp"
#include "kerrsim/gaussianity.hpp"
#include "kerrsim/liouville.hpp"
#include "kerrsim/operators.hpp"
#include "oracles.hpp"

using namespace kerrsim;

namespace {

// Symplectic eigenvalue from quadrature moments, x = (a + a^dag)/sqrt2, p = (a - a^dag)/(i sqrt2).
double symplectic_nu(const oracle::Mat& rho) {
  const int d = int(rho.rows());
  const oracle::Mat a = oracle::ladder(d);
  const oracle::Mat x = (a + a.adjoint()) / std::sqrt(2.0);
  const oracle::Mat p = (a - a.adjoint()) / Complex(0.0, std::sqrt(2.0));
  const double mx = oracle::expect(rho, x).real(), mp = oracle::expect(rho, p).real();
  const double vxx = oracle::expect(rho, x * x).real() - mx * mx;
  const double vpp = oracle::expect(rho, p * p).real() - mp * mp;
  const double vxp = 0.5 * oracle::expect(rho, x * p + p * x).real() - mx * mp;
  return std::sqrt(vxx * vpp - vxp * vxp);
}

// Entropy of the Gaussian reference: a thermal state with nbar = nu - 1/2,
// diagonalised numerically in a large basis (Gaussian unitaries leave it unchanged).
double reference_entropy(double nu) {
  const double nbar = nu - 0.5;
  const int d = 60 + int(40 * nbar);
  return oracle::entropy(oracle::thermal(d, nbar));
}

oracle::Mat squeezed_vacuum(int d, Complex zeta) {
  const int big = d + 60;
  const oracle::Mat a = oracle::ladder(big);
  const oracle::Mat S = (0.5 * (std::conj(zeta) * a * a - zeta * a.adjoint() * a.adjoint())).exp();
  oracle::Vec vac = oracle::Vec::Zero(big);
  vac(0) = 1.0;
  const oracle::Vec psi = (S * vac).head(d);
  return psi * psi.adjoint() / psi.squaredNorm();
}

}  // namespace

TEST_CASE("von Neumann entropy matches the spectral oracle") {
  const ModelParams p = ModelParams{}.with_epsilon(1.1).with_scale(2.0);
  const DensityMatrix rho = solve_ness(build_liouvillian(p, choose_truncation(p) + 1)).state;
  CHECK(von_neumann_entropy(rho) == doctest::Approx(oracle::entropy(rho.matrix())).epsilon(1e-10));
  CHECK(von_neumann_entropy(DensityMatrix::fock(10, 3)) == doctest::Approx(0.0));
  CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(8)) == doctest::Approx(std::log(8.0)));
}

TEST_CASE("Gaussian entropy function") {
  CHECK(gaussian_entropy(0.5) == doctest::Approx(0.0));
  for (double nu : {0.7, 1.5, 4.0}) CHECK(gaussian_entropy(nu) == doctest::Approx(reference_entropy(nu)).epsilon(1e-8));
  CHECK_THROWS_AS(gaussian_entropy(0.3), Error);
}

TEST_CASE("Gaussian states have zero non-Gaussianity") {
  const int d = 50;
  CHECK(non_gaussianity(DensityMatrix::coherent(d, Complex(1.0, 0.5))).value < 1e-9);
  CHECK(non_gaussianity(DensityMatrix(oracle::thermal(d + 30, 0.9))).value < 1e-8);
  CHECK(non_gaussianity(DensityMatrix(oracle::thermal(d + 30, 0.9)).displaced(Complex(0.7, 0.0))).value < 1e-6);
  CHECK(non_gaussianity(DensityMatrix(squeezed_vacuum(d, Complex(0.4, 0.2)))).value < 1e-8);
}

TEST_CASE("single-photon state") {
  const NonGaussianity g = non_gaussianity(DensityMatrix::fock(10, 1));
  CHECK(g.value == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(g.value == doctest::Approx(reference_entropy(1.5)).epsilon(1e-8));
}

TEST_CASE("non-Gaussianity equals the explicit-reference oracle for Kerr states") {
  for (double eps : {0.5, 1.1, 1.3}) {
    const ModelParams p = ModelParams{}.with_epsilon(eps).with_scale(2.0);
    const DensityMatrix rho = solve_ness(build_liouvillian(p, choose_truncation(p) + 1)).state;
    const double nu = symplectic_nu(rho.matrix());
    CHECK(second_moments(rho).nu_s == doctest::Approx(nu).epsilon(1e-10));
    const double ref = reference_entropy(nu) - oracle::entropy(rho.matrix());
    CHECK(non_gaussianity(rho).raw == doctest::Approx(ref).epsilon(1e-7));
    CHECK(non_gaussianity(rho).value >= 0.0);
  }
}

TEST_CASE("covariance of a coherent state is the vacuum covariance") {
  const GaussianMoments m = second_moments(DensityMatrix::coherent(40, Complex(-0.8, 1.2)));
  CHECK((m.covariance - Eigen::Matrix2d::Identity() / 2.0).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(m.nu_s == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(m.mean - Complex(-0.8, 1.2)) < 1e-10);
}
