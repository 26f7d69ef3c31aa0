#include "kerrsim/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kerrsim/error.hpp"
#include "kerrsim/meanfield.hpp"

namespace kerrsim {

namespace {

void require_dim(int d) {
  if (d < 1) fail(ErrorCode::invalid_dimension, "Fock dimension must be >= 1, got " + std::to_string(d));
}

}  // namespace

FockOperator::FockOperator(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
    fail(ErrorCode::invalid_dimension, "Fock operator must be square with dim >= 1");
  if (!entries_.allFinite()) fail(ErrorCode::invalid_parameter, "Fock operator has non-finite entries");
}

double FockOperator::hermiticity_error() const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

FockOperator annihilation(int d) {
  require_dim(d);
  CMatrix a = CMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return FockOperator(std::move(a));
}

FockOperator creation(int d) { return annihilation(d).adjoint(); }

FockOperator number_operator(int d) {
  require_dim(d);
  CMatrix n = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) n(k, k) = static_cast<double>(k);
  return FockOperator(std::move(n));
}

FockOperator identity_operator(int d) {
  require_dim(d);
  return FockOperator(CMatrix::Identity(d, d));
}

FockOperator build_hamiltonian(const ModelParams& p, int d) {
  require_dim(d);
  if (!std::isfinite(p.delta) || !std::isfinite(p.pump()) || !std::isfinite(p.interaction()))
    fail(ErrorCode::invalid_parameter, "Hamiltonian parameters must be finite");
  const double E = p.pump();
  const double U = p.interaction();
  // Entries are written directly so that H is Hermitian to the last bit.
  CMatrix h = CMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) {
    const double nn = static_cast<double>(n);
    h(n, n) = p.delta * nn + 0.5 * U * nn * (nn - 1.0);
    if (n + 1 < d) {
      const double s = std::sqrt(nn + 1.0);
      h(n + 1, n) = Complex(0.0, E * s);   // i E <n+1|a^dag|n>
      h(n, n + 1) = Complex(0.0, -E * s);  // -i E <n|a|n+1>
    }
  }
  return FockOperator(std::move(h));
}

double predicted_occupation(const ModelParams& p) {
  if (p.u <= 0.0) {
    return p.N * p.epsilon * p.epsilon / (p.kappa * p.kappa + p.delta * p.delta);
  }
  double n = 0.0;
  if (p.delta < -std::sqrt(3.0) * p.kappa) n = bistability_edges(p).n_at_lo;
  for (double root : mf_steady_states(p.epsilon, p).n) n = std::max(n, root);
  return p.N * n;
}

int choose_truncation(const ModelParams& p) {
  p.validate();
  return static_cast<int>(std::ceil(3.0 * predicted_occupation(p) + 20.0 - 1e-9));
}

}  // namespace kerrsim
