#include "kerrsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kerrsim/error.hpp"
#include "kerrsim/gaussianity.hpp"
#include "kerrsim/operators.hpp"
#include "krylov.hpp"

namespace kerrsim {

Propagator::Propagator(const Superoperator& L, double tol, int krylov_dim)
    : L_(&L), tol_(tol), krylov_dim_(krylov_dim), a_norm_(detail::inf_norm(L.matrix())) {
  if (!(tol > 0.0)) fail(ErrorCode::invalid_argument, "propagation tolerance must be > 0");
  if (krylov_dim < 2) fail(ErrorCode::invalid_argument, "Krylov dimension must be >= 2");
}

DensityMatrix Propagator::step(const DensityMatrix& rho, double dt) {
  if (!(dt > 0.0)) fail(ErrorCode::invalid_argument, "propagation step must be > 0");
  if (rho.dim() != L_->fock_dim()) fail(ErrorCode::invalid_dimension, "state and Liouvillian dimensions differ");
  detail::KrylovStats ks;
  const CVector out = detail::expmv(L_->matrix(), a_norm_, vectorize(rho.matrix()), dt, tol_, krylov_dim_,
                                    step_hint_, ks);
  DensityMatrix next(unvectorize(out, L_->fock_dim()));
  stats_.max_trace_drift = std::max(stats_.max_trace_drift, std::abs(next.trace() - rho.trace()));
  next.hermitize();
  stats_.substeps += ks.substeps;
  stats_.rejected += ks.rejected;
  stats_.matvecs += ks.matvecs;
  stats_.min_substep = stats_.min_substep == 0.0 ? ks.min_step : std::min(stats_.min_substep, ks.min_step);
  return next;
}

DensityMatrix propagate(const Superoperator& L, const DensityMatrix& rho, double dt, double tol) {
  Propagator prop(L, tol);
  return prop.step(rho, dt);
}

void QuenchSpec::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) fail(ErrorCode::invalid_parameter, msg);
  };
  require(eps_i >= 0.0 && eps_f >= 0.0, "quench pumps must be >= 0");
  require(N >= 1.0, "N must be >= 1");
  require(dt_out > 0.0 && dt_out <= t_max, "need 0 < dt_out <= t_max");
  require(tol > 0.0, "propagation tolerance must be > 0");
  require(n_max >= 0, "n_max override must be >= 0");
}

namespace {

TrajectoryPoint observe(double t, const DensityMatrix& rho, const ModelParams& p, const QuenchSpec& spec) {
  TrajectoryPoint pt;
  pt.t = t;
  pt.mean_a = rho.mean_a();
  pt.n = rho.mean_n();
  pt.alpha = pt.mean_a / std::sqrt(p.N);
  pt.flux = entropy_flux(rho, pt.alpha, p.N, p.kappa);
  if (spec.phasespace) pt.entropy = instantaneous_entropy(rho, p, spec.grid);
  if (spec.gaussianity) pt.gaussianity = non_gaussianity(rho);
  return pt;
}

void check_state(const DensityMatrix& rho, double t) {
  try {
    rho.check();
  } catch (const Error& e) {
    std::ostringstream os;
    os << "at t = " << t << ": " << e.what();
    throw Error(e.code(), os.str());
  }
}

}  // namespace

Trajectory run_quench(const ModelParams& model, const QuenchSpec& spec, const StateObserver& observer) {
  spec.validate();
  Trajectory traj;
  traj.initial = model.with_scale(spec.N).with_epsilon(spec.eps_i);
  traj.final = model.with_scale(spec.N).with_epsilon(spec.eps_f);
  traj.initial.validate();
  traj.final.validate();
  const int n_max =
      spec.n_max > 0 ? spec.n_max : std::max(choose_truncation(traj.initial), choose_truncation(traj.final));
  traj.fock_dim = n_max + 1;
  traj.dt_out = spec.dt_out;

  const Superoperator L_i = build_liouvillian(traj.initial, traj.fock_dim);
  NessResult ness = solve_ness(L_i);
  traj.ness_residual = ness.residual;
  DensityMatrix rho = std::move(ness.state);

  const Superoperator L_f = build_liouvillian(traj.final, traj.fock_dim);
  Propagator prop(L_f, spec.tol);

  const int steps = static_cast<int>(std::floor(spec.t_max / spec.dt_out + 1e-9));
  std::vector<EntropyRecord> records;
  for (int s = 0; s <= steps; ++s) {
    const double t = s * spec.dt_out;
    if (s > 0) rho = prop.step(rho, spec.dt_out);
    check_state(rho, t);
    traj.max_tail = std::max(traj.max_tail, rho.tail_population());
    if (observer) observer(t, rho);
    TrajectoryPoint pt = observe(t, rho, traj.final, spec);
    if (pt.entropy) {
      traj.max_norm_error = std::max(traj.max_norm_error, std::abs(pt.entropy->norm - 1.0));
      records.push_back(*pt.entropy);
    }
    traj.points.push_back(std::move(pt));
    if (spec.keep_states) traj.states.push_back(rho);
  }
  if (spec.phasespace) {
    fill_balance_residuals(records, spec.dt_out);
    for (std::size_t i = 0; i < records.size(); ++i) traj.points[i].entropy = records[i];
  }
  traj.propagation = prop.stats();
  return traj;
}

}  // namespace kerrsim
