#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "kerrsim/dynamics.hpp"
#include "kerrsim/error.hpp"
#include "kerrsim/operators.hpp"
#include "oracles.hpp"

using namespace kerrsim;

TEST_CASE("Krylov propagation matches the dense matrix exponential") {
  ModelParams p;
  p.epsilon = 0.9;
  p.N = 2.0;
  const int d = 12;
  const Superoperator L = build_liouvillian(p, d);
  const DensityMatrix rho0 = DensityMatrix::coherent(d, Complex(0.5, 0.2));
  const double t = 1.7;
  const oracle::Mat Ld = CMatrix(L.matrix());
  const oracle::Mat expL = (Ld * t).exp();
  const CMatrix ref = unvectorize(expL * vectorize(rho0.matrix()), d);
  const DensityMatrix out = propagate(L, rho0, t, 1e-10);
  CHECK((out.matrix() - ref).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("propagation keeps trace and hermiticity") {
  ModelParams p;
  p.epsilon = 1.3;
  p.N = 5.0;
  const int d = choose_truncation(p) + 1;
  const Superoperator L = build_liouvillian(p, d);
  Propagator prop(L);
  DensityMatrix rho = DensityMatrix::vacuum(d);
  for (int k = 0; k < 20; ++k) rho = prop.step(rho, 0.2);
  CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
  CHECK(rho.diagnose().hermiticity_error < 1e-12);
  CHECK(rho.diagnose().min_eigenvalue > -1e-8);
  CHECK(prop.stats().max_trace_drift < 1e-10);
  CHECK(prop.stats().substeps >= 20);
}

TEST_CASE("the steady state is stationary under its own generator") {
  ModelParams p;
  p.epsilon = 0.8;
  p.N = 3.0;
  const Superoperator L = build_liouvillian(p, choose_truncation(p) + 1);
  const DensityMatrix ness = solve_ness(L).state;
  const DensityMatrix later = propagate(L, ness, 5.0);
  CHECK((later.matrix() - ness.matrix()).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("linear cavity quench follows the analytic amplitude") {
  ModelParams p;
  p.u = 0.0;
  QuenchSpec spec;
  spec.eps_i = 0.3;
  spec.eps_f = 1.0;
  spec.N = 2.0;
  spec.t_max = 4.0;
  spec.phasespace = false;
  const Trajectory traj = run_quench(p, spec);
  const Complex rate(p.kappa, p.delta);
  const Complex a_i = oracle::linear_amplitude(p.delta, p.kappa, std::sqrt(2.0) * 0.3);
  const Complex a_f = oracle::linear_amplitude(p.delta, p.kappa, std::sqrt(2.0) * 1.0);
  REQUIRE(traj.points.size() == 21);
  for (const auto& pt : traj.points) {
    const Complex expected = a_f + (a_i - a_f) * std::exp(-rate * pt.t);
    CHECK(std::abs(pt.mean_a - expected) < 1e-7);
    CHECK(pt.n == doctest::Approx(std::norm(expected)).epsilon(1e-6));
    // coherent throughout, so no non-Gaussianity
    CHECK(pt.gaussianity->value < 1e-6);
    CHECK(pt.flux.phi == doctest::Approx(2.0 * p.kappa * pt.n).epsilon(1e-12));
  }
}

TEST_CASE("quench records the configured cadence and common truncation") {
  ModelParams p;
  QuenchSpec spec;
  spec.eps_i = 0.5;
  spec.eps_f = 1.1;
  spec.N = 2.0;
  spec.t_max = 1.0;
  spec.phasespace = false;
  spec.keep_states = true;
  const Trajectory traj = run_quench(p, spec);
  const int expect_dim = std::max(choose_truncation(traj.initial), choose_truncation(traj.final)) + 1;
  CHECK(traj.fock_dim == expect_dim);
  REQUIRE(traj.points.size() == 6);
  REQUIRE(traj.states.size() == 6);
  for (std::size_t k = 0; k < traj.points.size(); ++k) CHECK(traj.points[k].t == doctest::Approx(0.2 * k));
  CHECK(traj.points.front().alpha == traj.points.front().mean_a / std::sqrt(2.0));
  CHECK(traj.ness_residual < 1e-10);
}

TEST_CASE("quench spec validation") {
  QuenchSpec spec;
  spec.dt_out = 0.0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = QuenchSpec{};
  spec.N = 0.5;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = QuenchSpec{};
  spec.tol = -1.0;
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("too small a basis is reported as a truncation failure with its time") {
  ModelParams p;
  QuenchSpec spec;
  spec.eps_f = 1.3;
  spec.N = 5.0;
  spec.t_max = 20.0;
  spec.n_max = 12;
  spec.phasespace = false;
  spec.gaussianity = false;
  try {
    run_quench(p, spec);
    FAIL("expected a truncation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::truncation);
    CHECK(std::string(e.what()).find("at t =") != std::string::npos);
  }
}
