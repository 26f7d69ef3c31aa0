#pragma once

#include <optional>
#include <vector>

#include "kerrsim/error.hpp"
#include "kerrsim/params.hpp"
#include "kerrsim/state.hpp"
#include "kerrsim/types.hpp"

namespace kerrsim {

/// Vectorized Lindblad generator acting on column-major vec(rho),
/// vec(A rho B) = (B^T kron A) vec(rho).
class Superoperator {
 public:
  Superoperator(SparseCMatrix matrix, int fock_dim, ModelParams params);

  int fock_dim() const { return dim_; }
  int size() const { return dim_ * dim_; }
  const SparseCMatrix& matrix() const { return matrix_; }
  const ModelParams& params() const { return params_; }

  CVector apply(const CVector& v) const { return matrix_ * v; }
  CMatrix apply(const CMatrix& rho) const;
  /// max |L^dagger(1)|: zero for a trace-preserving generator.
  double trace_preservation_error() const;

 private:
  SparseCMatrix matrix_;
  int dim_;
  ModelParams params_;
};

CVector vectorize(const CMatrix& rho);
CMatrix unvectorize(const CVector& v, int d);

/// drho/dt = -i[H, rho] + 2 kappa (a rho a^dag - {a^dag a, rho}/2).
Superoperator build_liouvillian(const ModelParams& p, int d);

struct NessOptions {
  /// Second-smallest |eigenvalue| below this flags a numerically degenerate kernel.
  double degeneracy_threshold = 1e-12;
  double residual_tolerance = 1e-10;
  double clip = -1e-8;
};

struct NessResult {
  DensityMatrix state;
  double residual = 0.0;            // max |L(rho)|
  Complex next_eigenvalue = 0.0;    // eigenvalue nearest to zero after zeta_0
};

/// Thrown by solve_ness when the kernel is not numerically one-dimensional.
class DegenerateNullSpace : public Error {
 public:
  DegenerateNullSpace(const std::string& what, std::vector<CMatrix> candidates, std::vector<Complex> eigenvalues)
      : Error(ErrorCode::degenerate_null_space, what),
        candidates_(std::move(candidates)),
        eigenvalues_(std::move(eigenvalues)) {}
  const std::vector<CMatrix>& candidates() const { return candidates_; }
  const std::vector<Complex>& eigenvalues() const { return eigenvalues_; }

 private:
  std::vector<CMatrix> candidates_;
  std::vector<Complex> eigenvalues_;
};

/// Steady state from the eigenpair of L closest to zero, normalized to unit
/// trace, Hermitized and with tiny negative eigenvalues clipped.
NessResult solve_ness(const Superoperator& L, const NessOptions& opt = {});

struct SpectrumOptions {
  bool eigenmatrices = false;
  double tol = 1e-12;
  int max_iterations = 5000;
  /// Eigenvalues requested from the shift-invert solver per wanted one.
  int oversample = 3;
};

struct SpectrumResult {
  std::vector<Complex> eigenvalues;  // sorted by |Re| ascending
  double gap = 0.0;                  // |Re zeta_1|
  std::vector<CMatrix> eigenmatrices;
};

/// The k eigenvalues of smallest |Re|. Small problems are diagonalized
/// densely, larger ones with shift-invert Arnoldi around the origin.
SpectrumResult spectrum(const Superoperator& L, int k, const SpectrumOptions& opt = {});

/// Full dense spectrum, sorted by |Re|. Only for small d.
std::vector<Complex> dense_spectrum(const Superoperator& L);

}  // namespace kerrsim
