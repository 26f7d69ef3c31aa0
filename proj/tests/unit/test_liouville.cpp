#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "kerrsim/liouville.hpp"
#include "kerrsim/operators.hpp"
#include "oracles.hpp"

using namespace kerrsim;

namespace {

ModelParams params(double eps, double N, double u = 1.0) {
  ModelParams p;
  p.epsilon = eps;
  p.N = N;
  p.u = u;
  return p;
}

}  // namespace

TEST_CASE("sparse Liouvillian equals the Kronecker-product oracle") {
  for (double eps : {0.0, 0.7}) {
    const ModelParams p = params(eps, 2.0);
    const int d = 9;
    const Superoperator L = build_liouvillian(p, d);
    const oracle::Mat ref =
        oracle::liouvillian(oracle::hamiltonian(p.delta, p.pump(), p.interaction(), d), oracle::ladder(d), p.kappa);
    CHECK((CMatrix(L.matrix()) - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("vectorisation round trip and action on matrices") {
  const int d = 6;
  CMatrix rho = CMatrix::Random(d, d);
  CHECK((unvectorize(vectorize(rho), d) - rho).cwiseAbs().maxCoeff() == 0.0);
  const ModelParams p = params(0.4, 1.0);
  const Superoperator L = build_liouvillian(p, d);
  const CMatrix H = build_hamiltonian(p, d).matrix();
  const CMatrix a = annihilation(d).matrix();
  const Complex i(0.0, 1.0);
  const CMatrix direct = -i * (H * rho - rho * H) +
                         2.0 * p.kappa * (a * rho * a.adjoint() - 0.5 * (a.adjoint() * a * rho + rho * a.adjoint() * a));
  CHECK((L.apply(rho) - direct).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Liouvillian preserves trace") {
  for (double N : {1.0, 5.0}) {
    const ModelParams p = params(1.1, N);
    const Superoperator L = build_liouvillian(p, choose_truncation(p) + 1);
    CHECK(L.trace_preservation_error() < 1e-10);
  }
}

TEST_CASE("linear cavity relaxes to the coherent state") {
  const ModelParams p = params(0.9, 3.0, 0.0);
  const int d = choose_truncation(p) + 1;
  const NessResult r = solve_ness(build_liouvillian(p, d));
  const Complex alpha = oracle::linear_amplitude(p.delta, p.kappa, p.pump());
  CHECK((r.state.matrix() - oracle::coherent_state(d, alpha)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(r.residual < 1e-10);
}

TEST_CASE("NESS is a valid state for dense and iterative paths") {
  for (double N : {1.0, 5.0, 10.0})
    for (double eps : {0.3, 1.1}) {
      const ModelParams p = params(eps, N);
      const Superoperator L = build_liouvillian(p, choose_truncation(p) + 1);
      const NessResult r = solve_ness(L);
      CHECK(r.residual < 1e-10);
      const StateDiagnostics diag = r.state.diagnose();
      CHECK(diag.hermiticity_error < 1e-10);
      CHECK(diag.trace_error < 1e-8);
      CHECK(diag.min_eigenvalue > -1e-8);
      CHECK(diag.tail_population < 1e-8);
      // the stationary state must be annihilated by the oracle generator as well
      if (L.fock_dim() <= 30) {
        const oracle::Mat ref = oracle::liouvillian(
            oracle::hamiltonian(p.delta, p.pump(), p.interaction(), L.fock_dim()), oracle::ladder(L.fock_dim()),
            p.kappa);
        CHECK((ref * vectorize(r.state.matrix())).cwiseAbs().maxCoeff() < 1e-9);
      }
    }
}

TEST_CASE("a generator without a unique steady state is reported") {
  const int d = 3;
  SparseCMatrix zero(d * d, d * d);
  const Superoperator L(zero, d, params(0.5, 1.0));
  try {
    solve_ness(L);
    FAIL("expected a degenerate null space");
  } catch (const DegenerateNullSpace& e) {
    CHECK(e.code() == ErrorCode::degenerate_null_space);
    CHECK(e.candidates().size() >= 2);
  }
}

TEST_CASE("linear cavity spectrum") {
  // eigenvalues are -(kappa + i delta) m - (kappa - i delta) n for m, n >= 0
  const ModelParams p = params(0.5, 1.0, 0.0);
  const SpectrumResult s = spectrum(build_liouvillian(p, 14), 5);
  REQUIRE(s.eigenvalues.size() == 5);
  CHECK(std::abs(s.eigenvalues[0]) < 1e-9);
  CHECK(s.gap == doctest::Approx(p.kappa).epsilon(1e-8));
  for (int i = 1; i < 3; ++i) {
    CHECK(s.eigenvalues[i].real() == doctest::Approx(-p.kappa).epsilon(1e-8));
    CHECK(std::abs(std::abs(s.eigenvalues[i].imag()) - std::abs(p.delta)) < 1e-8);
  }
}

TEST_CASE("iterative spectrum agrees with dense diagonalisation") {
  const ModelParams p = params(0.9, 2.0);
  const Superoperator L = build_liouvillian(p, 24);  // d^2 = 576 takes the Arnoldi path
  const SpectrumResult s = spectrum(L, 6);
  const std::vector<Complex> all = dense_spectrum(L);
  REQUIRE(all.size() == 576);
  for (std::size_t i = 0; i < 4; ++i) {
    double best = 1e9;
    for (const Complex& z : all) best = std::min(best, std::abs(z - s.eigenvalues[i]));
    CHECK(best < 1e-8);
  }
  CHECK(s.gap == doctest::Approx(std::abs(all[1].real())).epsilon(1e-8));
  for (const Complex& z : all) CHECK(z.real() < 1e-9);
}

TEST_CASE("spectrum argument checks") {
  const Superoperator L = build_liouvillian(params(0.5, 1.0), 4);
  CHECK_THROWS_AS(spectrum(L, 1), Error);
  CHECK_THROWS_AS(spectrum(L, 17), Error);
}

TEST_CASE("undriven cavity relaxes to the exact vacuum") {
  for (double N : {1.0, 2.0}) {
    const ModelParams p = params(0.0, N);
    const NessResult r = solve_ness(build_liouvillian(p, choose_truncation(p) + 1));
    CHECK(r.residual == 0.0);
    CHECK(r.state.mean_n() == 0.0);
  }
}
