#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "kerrsim/gaussianity.hpp"
#include "kerrsim/liouville.hpp"
#include "kerrsim/params.hpp"
#include "kerrsim/phasespace.hpp"
#include "kerrsim/state.hpp"

namespace kerrsim {

struct PropagationStats {
  int substeps = 0;
  int rejected = 0;
  long matvecs = 0;
  double min_substep = 0.0;
  double max_trace_drift = 0.0;
};

/// Applies exp(L t) to states using a Krylov subspace; the generator is never
/// exponentiated densely. Keeps the adaptive substep between calls.
class Propagator {
 public:
  explicit Propagator(const Superoperator& L, double tol = 1e-8, int krylov_dim = 30);

  /// Advances by dt, symmetrizes, and records the trace drift of the step.
  DensityMatrix step(const DensityMatrix& rho, double dt);
  const PropagationStats& stats() const { return stats_; }

 private:
  const Superoperator* L_;
  double tol_;
  int krylov_dim_;
  double a_norm_;
  double step_hint_ = 0.0;
  PropagationStats stats_;
};

/// One-shot exp(L dt) rho.
DensityMatrix propagate(const Superoperator& L, const DensityMatrix& rho, double dt, double tol = 1e-8);

struct QuenchSpec {
  double eps_i = 0.5;
  double eps_f = 0.6;
  double N = 1.0;
  double t_max = 10.0;
  double dt_out = 0.2;
  double tol = 1e-8;
  int n_max = 0;  // 0: max of choose_truncation at eps_i and eps_f
  GridOptions grid{};
  bool phasespace = true;
  bool gaussianity = true;
  bool keep_states = false;

  void validate() const;
};

struct TrajectoryPoint {
  double t = 0.0;
  Complex mean_a = 0.0;
  double n = 0.0;
  Complex alpha = 0.0;  // <a> / sqrt(N)
  EntropyFlux flux;     // available without the phase-space pipeline
  std::optional<EntropyRecord> entropy;
  std::optional<NonGaussianity> gaussianity;
};

struct Trajectory {
  ModelParams initial;
  ModelParams final;
  int fock_dim = 0;
  double dt_out = 0.0;
  double ness_residual = 0.0;
  double max_norm_error = 0.0;    // worst |quadrature of Q - 1|
  double max_tail = 0.0;
  PropagationStats propagation;
  std::vector<TrajectoryPoint> points;
  std::vector<DensityMatrix> states;  // only with keep_states
};

/// Called once per output step with the freshly propagated state.
using StateObserver = std::function<void(double t, const DensityMatrix&)>;

/// Sudden quench eps_i -> eps_f: rho_0 is the steady state at eps_i, then the
/// state evolves under the Liouvillian at eps_f, sampled every dt_out.
/// `model` supplies delta, kappa and u. Truncation leaks are reported with the
/// time at which they occur.
Trajectory run_quench(const ModelParams& model, const QuenchSpec& spec, const StateObserver& observer = {});

}  // namespace kerrsim
