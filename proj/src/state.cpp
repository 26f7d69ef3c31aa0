#include "kerrsim/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "kerrsim/error.hpp"

namespace kerrsim {

bool StateDiagnostics::ok(const StateTolerances& tol) const {
  return hermiticity_error <= tol.hermiticity && trace_error <= tol.trace && min_eigenvalue >= tol.min_eigenvalue &&
         tail_population <= tol.tail;
}

DensityMatrix::DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() < 1)
    fail(ErrorCode::invalid_dimension, "density matrix must be square with dim >= 1");
}

CVector coherent_vector(int d, Complex mu) {
  CVector c(d);
  c(0) = std::exp(-0.5 * std::norm(mu));
  for (int n = 1; n < d; ++n) c(n) = c(n - 1) * mu / std::sqrt(static_cast<double>(n));
  return c;
}

DensityMatrix DensityMatrix::vacuum(int d) { return fock(d, 0); }

DensityMatrix DensityMatrix::fock(int d, int n) {
  if (d < 1) fail(ErrorCode::invalid_dimension, "dimension must be >= 1");
  if (n < 0 || n >= d) fail(ErrorCode::invalid_argument, "Fock level outside the truncation");
  CMatrix rho = CMatrix::Zero(d, d);
  rho(n, n) = 1.0;
  return DensityMatrix(std::move(rho));
}

DensityMatrix DensityMatrix::coherent(int d, Complex alpha) {
  if (d < 1) fail(ErrorCode::invalid_dimension, "dimension must be >= 1");
  CVector c = coherent_vector(d, alpha);
  c.normalize();
  return DensityMatrix(c * c.adjoint());
}

DensityMatrix DensityMatrix::thermal(int d, double nbar) {
  if (d < 1) fail(ErrorCode::invalid_dimension, "dimension must be >= 1");
  if (nbar < 0.0) fail(ErrorCode::invalid_argument, "thermal occupation must be >= 0");
  CMatrix rho = CMatrix::Zero(d, d);
  const double ratio = nbar / (1.0 + nbar);
  double p = 1.0, total = 0.0;
  for (int n = 0; n < d; ++n) {
    rho(n, n) = p;
    total += p;
    p *= ratio;
  }
  rho /= total;
  return DensityMatrix(std::move(rho));
}

DensityMatrix DensityMatrix::maximally_mixed(int d) {
  if (d < 1) fail(ErrorCode::invalid_dimension, "dimension must be >= 1");
  return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(d));
}

Complex DensityMatrix::expect(const CMatrix& op) const {
  if (op.rows() != rho_.rows() || op.cols() != rho_.cols())
    fail(ErrorCode::invalid_dimension, "operator and state dimensions differ");
  // tr(op rho) = sum_ij op_ij rho_ji
  return (op.transpose().cwiseProduct(rho_)).sum();
}

Complex DensityMatrix::mean_a() const {
  Complex s = 0.0;
  for (int n = 1; n < dim(); ++n) s += std::sqrt(static_cast<double>(n)) * rho_(n, n - 1);
  return s;
}

Complex DensityMatrix::mean_a2() const {
  Complex s = 0.0;
  for (int n = 2; n < dim(); ++n) s += std::sqrt(static_cast<double>(n) * (n - 1)) * rho_(n, n - 2);
  return s;
}

double DensityMatrix::mean_n() const {
  double s = 0.0;
  for (int n = 1; n < dim(); ++n) s += n * rho_(n, n).real();
  return s;
}

double DensityMatrix::tail_population(int width) const {
  double s = 0.0;
  for (int n = std::max(0, dim() - width); n < dim(); ++n) s += rho_(n, n).real();
  return s;
}

StateDiagnostics DensityMatrix::diagnose() const {
  StateDiagnostics d;
  d.hermiticity_error = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(rho_.trace() - 1.0);
  const CMatrix herm = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  d.tail_population = tail_population();
  return d;
}

void DensityMatrix::check(const StateTolerances& tol) const {
  const StateDiagnostics d = diagnose();
  if (d.tail_population > tol.tail) {
    std::ostringstream os;
    os << "state leaks out of the truncated basis: top-" << tol.tail_width << " population " << d.tail_population
       << " at dim " << dim();
    fail(ErrorCode::truncation, os.str());
  }
  if (!d.ok(tol)) {
    std::ostringstream os;
    os << "invalid density matrix: hermiticity " << d.hermiticity_error << ", trace error " << d.trace_error
       << ", min eigenvalue " << d.min_eigenvalue;
    fail(ErrorCode::state_invalid, os.str());
  }
}

void DensityMatrix::hermitize() { rho_ = (0.5 * (rho_ + rho_.adjoint())).eval(); }

void DensityMatrix::sanitize(double clip) {
  hermitize();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho_);
  RVector w = es.eigenvalues();
  if (w.minCoeff() < clip) {
    std::ostringstream os;
    os << "state has eigenvalue " << w.minCoeff() << " below " << clip;
    fail(ErrorCode::state_invalid, os.str());
  }
  if (w.minCoeff() < 0.0) {
    w = w.cwiseMax(0.0);
    rho_ = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
  }
  rho_ /= rho_.trace().real();
  hermitize();
}

DensityMatrix DensityMatrix::displaced(Complex beta) const {
  const int d = dim();
  const int big = d + 40 + static_cast<int>(std::ceil(8.0 * std::norm(beta)));
  CMatrix a = CMatrix::Zero(big, big);
  for (int n = 1; n < big; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const CMatrix gen = beta * a.adjoint() - std::conj(beta) * a;
  const CMatrix D = gen.exp();
  CMatrix padded = CMatrix::Zero(big, big);
  padded.topLeftCorner(d, d) = rho_;
  const CMatrix out = D * padded * D.adjoint();
  return DensityMatrix(out.topLeftCorner(d, d));
}

}  // namespace kerrsim
