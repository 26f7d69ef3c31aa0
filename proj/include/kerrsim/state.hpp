#pragma once

#include <vector>

#include "kerrsim/operators.hpp"
#include "kerrsim/types.hpp"

namespace kerrsim {

struct StateTolerances {
  double hermiticity = 1e-10;
  double trace = 1e-8;
  double min_eigenvalue = -1e-8;
  double tail = 1e-8;
  int tail_width = 5;
};

struct StateDiagnostics {
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  double tail_population = 0.0;

  bool ok(const StateTolerances& tol = {}) const;
};

/// System state in the truncated Fock basis.
///
/// Construction does not enforce the physical invariants (solvers produce
/// intermediate matrices that are close but not exact); call check() at
/// the boundaries where a valid state is required.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix rho);

  static DensityMatrix vacuum(int d);
  static DensityMatrix fock(int d, int n);
  /// Coherent state |alpha>, renormalized within the truncation.
  static DensityMatrix coherent(int d, Complex alpha);
  /// Thermal state with mean occupation nbar, renormalized within the truncation.
  static DensityMatrix thermal(int d, double nbar);
  static DensityMatrix maximally_mixed(int d);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const CMatrix& matrix() const { return rho_; }

  Complex trace() const { return rho_.trace(); }
  Complex expect(const CMatrix& op) const;
  Complex expect(const FockOperator& op) const { return expect(op.matrix()); }
  Complex mean_a() const;      // <a>
  Complex mean_a2() const;     // <a^2>
  double mean_n() const;       // <a^dag a>

  /// Population of the top `width` Fock levels.
  double tail_population(int width = 5) const;
  StateDiagnostics diagnose() const;
  /// Throws state_invalid (or truncation, for the tail) if any tolerance is violated.
  void check(const StateTolerances& tol = {}) const;

  /// (rho + rho^dag) / 2.
  void hermitize();
  /// Hermitize, clip eigenvalues in [clip, 0) to zero and renormalize the
  /// trace. Eigenvalues below `clip` are a genuine failure: state_invalid.
  void sanitize(double clip = -1e-8);

  /// D(beta) rho D(beta)^dag, evaluated in a padded basis and truncated back.
  DensityMatrix displaced(Complex beta) const;

 private:
  CMatrix rho_;
};

/// Coherent-state amplitudes <n|mu> for n < d.
CVector coherent_vector(int d, Complex mu);

}  // namespace kerrsim
