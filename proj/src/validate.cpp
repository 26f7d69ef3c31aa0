#include <cmath>
#include <numbers>

#include "kerrsim/dynamics.hpp"
#include "kerrsim/exactness.hpp"
#include "kerrsim/gaussianity.hpp"
#include "kerrsim/liouville.hpp"
#include "kerrsim/meanfield.hpp"
#include "kerrsim/operators.hpp"
#include "kerrsim/phasespace.hpp"
#include "kerrsim/runner.hpp"

namespace kerrsim {

namespace {

void add(std::vector<ValidationCheck>& out, std::string name, double value, double tol) {
  out.push_back({std::move(name), value, tol, std::isfinite(value) && value <= tol});
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

std::vector<ValidationCheck> validation_suite(const ModelParams& model) {
  std::vector<ValidationCheck> out;
  const ModelParams p = model.with_scale(2.0).with_epsilon(0.8);
  const int d = choose_truncation(p) + 1;

  add(out, "hamiltonian_hermiticity", build_hamiltonian(p, d).hermiticity_error(), 1e-12);
  const Superoperator L = build_liouvillian(p, d);
  add(out, "liouvillian_trace_preservation", L.trace_preservation_error(), 1e-10);

  const NessResult ness = solve_ness(L);
  const StateDiagnostics diag = ness.state.diagnose();
  add(out, "ness_residual", ness.residual, 1e-10);
  add(out, "ness_trace", diag.trace_error, 1e-8);
  add(out, "ness_positivity", -diag.min_eigenvalue, 1e-8);
  add(out, "ness_tail_population", diag.tail_population, 1e-8);

  if (p.u > 0.0) {
    const Complex exact = exact_moment(0, 1, p);
    add(out, "exact_moment_a", std::abs(exact - ness.state.mean_a()) / std::abs(exact), 1e-6);
    const Complex exact_n = exact_moment(1, 1, p);
    add(out, "exact_moment_n", rel(exact_n.real(), ness.state.mean_n()), 1e-6);

    const BistabilityEdges e = bistability_edges(model);
    auto eq = [&](double n, double eps) {
      const double s = model.delta + n * model.u;
      return std::abs(n * (model.kappa * model.kappa + s * s) - eps * eps);
    };
    add(out, "bistability_edge_residual", std::max(eq(e.n_at_lo, e.eps_lo), eq(e.n_at_hi, e.eps_hi)), 1e-10);
  }

  const EntropyRecord r = instantaneous_entropy(ness.state, p);
  add(out, "husimi_norm", std::abs(r.norm - 1.0), 1e-4);
  add(out, "ness_entropy_balance", std::abs(r.pi_u + r.pi_j - r.phi) / r.phi, 1e-2);
  // exact up to the quadrature error of the grid
  add(out, "dissipative_split", std::abs(r.pi_j - r.pi_ext - r.pi_d) / r.pi_j, GridOptions{}.norm_tolerance);
  add(out, "pi_d_nonnegative", -r.pi_d, 1e-6);

  const int dc = 30;
  const DensityMatrix coh = DensityMatrix::coherent(dc, Complex(1.0, -0.5));
  add(out, "coherent_non_gaussianity", std::abs(non_gaussianity(coh).raw), 1e-8);
  const HusimiField coh_field = adaptive_field(coh);
  add(out, "coherent_wehrl_entropy", std::abs(wehrl_entropy(coh_field) - (1.0 + std::log(std::numbers::pi))), 1e-3);

  const ModelParams q = p.with_epsilon(0.5);
  const DensityMatrix start = solve_ness(build_liouvillian(q, d)).state;
  const DensityMatrix later = propagate(L, start, 1.0);
  add(out, "propagation_trace", std::abs(later.trace() - 1.0), 1e-10);
  add(out, "propagation_hermiticity", later.diagnose().hermiticity_error, 1e-10);
  return out;
}

}  // namespace kerrsim
