#include "kerrsim/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "kerrsim/error.hpp"
#include "kerrsim/operators.hpp"
#include "shift_invert.hpp"

namespace kerrsim {

namespace {

// Shift for the shift-invert solves: every eigenvalue has Re <= 0, so a small
// positive real shift keeps (L - sigma) invertible while staying close to zeta_0.
constexpr double kShift = 1e-3;
// Below this many unknowns a dense eigendecomposition is cheaper than Arnoldi.
constexpr int kDenseLimit = 400;

bool by_abs_real(Complex a, Complex b) {
  const double ra = std::abs(a.real()), rb = std::abs(b.real());
  if (ra != rb) return ra < rb;
  if (std::abs(a.imag()) != std::abs(b.imag())) return std::abs(a.imag()) < std::abs(b.imag());
  return a.imag() < b.imag();
}

CMatrix normalized_state(const CVector& v, int d) {
  CMatrix rho = unvectorize(v, d);
  const Complex tr = rho.trace();
  if (std::abs(tr) == 0.0) fail(ErrorCode::convergence, "null vector has zero trace");
  return rho / tr;
}

}  // namespace

Superoperator::Superoperator(SparseCMatrix matrix, int fock_dim, ModelParams params)
    : matrix_(std::move(matrix)), dim_(fock_dim), params_(params) {
  if (fock_dim < 1 || matrix_.rows() != static_cast<Eigen::Index>(fock_dim) * fock_dim ||
      matrix_.cols() != matrix_.rows())
    fail(ErrorCode::invalid_dimension, "superoperator size must be d^2 x d^2");
  matrix_.makeCompressed();
}

CMatrix Superoperator::apply(const CMatrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) fail(ErrorCode::invalid_dimension, "state dimension mismatch");
  return unvectorize(matrix_ * vectorize(rho), dim_);
}

double Superoperator::trace_preservation_error() const {
  const CVector id = vectorize(CMatrix::Identity(dim_, dim_));
  const CVector r = matrix_.adjoint() * id;
  return r.cwiseAbs().maxCoeff();
}

CVector vectorize(const CMatrix& rho) { return Eigen::Map<const CVector>(rho.data(), rho.size()); }

CMatrix unvectorize(const CVector& v, int d) {
  if (v.size() != static_cast<Eigen::Index>(d) * d) fail(ErrorCode::invalid_dimension, "vector is not d^2 long");
  return Eigen::Map<const CMatrix>(v.data(), d, d);
}

Superoperator build_liouvillian(const ModelParams& p, int d) {
  p.validate();
  const FockOperator H = build_hamiltonian(p, d);
  const auto idx = [d](int i, int j) { return i + j * d; };
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<std::size_t>(d) * d * 7);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      const int row = idx(i, j);
      // -i H rho: H is tridiagonal
      for (int k = std::max(0, i - 1); k <= std::min(d - 1, i + 1); ++k)
        if (H(i, k) != Complex(0.0)) t.emplace_back(row, idx(k, j), -I * H(i, k));
      // +i rho H
      for (int k = std::max(0, j - 1); k <= std::min(d - 1, j + 1); ++k)
        if (H(k, j) != Complex(0.0)) t.emplace_back(row, idx(i, k), I * H(k, j));
      // 2 kappa a rho a^dag
      if (i + 1 < d && j + 1 < d)
        t.emplace_back(row, idx(i + 1, j + 1), 2.0 * p.kappa * std::sqrt(static_cast<double>(i + 1) * (j + 1)));
      // -kappa {a^dag a, rho}
      if (i + j > 0) t.emplace_back(row, row, -p.kappa * static_cast<double>(i + j));
    }
  }
  SparseCMatrix L(d * d, d * d);
  L.setFromTriplets(t.begin(), t.end());
  return Superoperator(std::move(L), d, p);
}

std::vector<Complex> dense_spectrum(const Superoperator& L) {
  const CMatrix dense = CMatrix(L.matrix());
  Eigen::ComplexEigenSolver<CMatrix> es(dense, false);
  if (es.info() != Eigen::Success) fail(ErrorCode::convergence, "dense eigensolver failed");
  std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end(), by_abs_real);
  return out;
}

NessResult solve_ness(const Superoperator& L, const NessOptions& opt) {
  const int d = L.fock_dim();
  const int n = L.size();
  if (d == 1) return {DensityMatrix(CMatrix::Ones(1, 1)), 0.0, Complex(0.0)};

  std::vector<Complex> values;
  std::vector<CVector> vectors;
  if (n <= 64) {
    const CMatrix dense = CMatrix(L.matrix());
    Eigen::ComplexEigenSolver<CMatrix> es(dense, true);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return std::abs(es.eigenvalues()(a)) < std::abs(es.eigenvalues()(b)); });
    for (int k = 0; k < 2; ++k) {
      values.push_back(es.eigenvalues()(order[k]));
      vectors.push_back(es.eigenvectors().col(order[k]));
    }
  } else {
    detail::EigenPairs ep = detail::shift_invert_eigs(L.matrix(), Complex(kShift), 2, true, 1e-14, 3000);
    if (ep.values.size() < 2) fail(ErrorCode::convergence, "shift-invert did not converge two eigenpairs");
    std::vector<int> order = {0, 1};
    if (std::abs(ep.values[1]) < std::abs(ep.values[0])) std::swap(order[0], order[1]);
    for (int k : order) {
      values.push_back(ep.values[k]);
      vectors.push_back(ep.vectors[k]);
    }
  }

  if (std::abs(values[1]) < opt.degeneracy_threshold) {
    std::ostringstream os;
    os << "steady state is numerically degenerate: |zeta_1| = " << std::abs(values[1]);
    std::vector<CMatrix> cands;
    for (const auto& v : vectors) cands.push_back(unvectorize(v, d));
    throw DegenerateNullSpace(os.str(), std::move(cands), values);
  }

  CMatrix rho = normalized_state(vectors[0], d);
  double residual = L.apply(rho).cwiseAbs().maxCoeff();
  if (residual > opt.residual_tolerance) {
    // Inverse-iteration polish with the same shift.
    SparseCMatrix shifted = L.matrix();
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) -= kShift;
    Eigen::SparseLU<SparseCMatrix, Eigen::COLAMDOrdering<int>> lu(shifted);
    if (lu.info() != Eigen::Success) fail(ErrorCode::convergence, "sparse LU failed during NESS polish");
    CVector x = vectorize(rho);
    for (int it = 0; it < 3 && residual > opt.residual_tolerance; ++it) {
      x = lu.solve(x);
      x /= x.norm();
      rho = normalized_state(x, d);
      residual = L.apply(rho).cwiseAbs().maxCoeff();
    }
  }

  // An undriven cavity relaxes to the vacuum. When the vacuum is an exact
  // kernel element and the solver agrees, return it without rounding noise.
  CMatrix vac = CMatrix::Zero(d, d);
  vac(0, 0) = 1.0;
  if ((rho - vac).cwiseAbs().maxCoeff() < 1e-8 && L.apply(vac).cwiseAbs().maxCoeff() == 0.0) rho = vac;

  DensityMatrix state(rho);
  state.sanitize(opt.clip);
  residual = L.apply(state.matrix()).cwiseAbs().maxCoeff();
  if (residual > opt.residual_tolerance) {
    std::ostringstream os;
    os << "NESS residual " << residual << " exceeds " << opt.residual_tolerance;
    fail(ErrorCode::convergence, os.str());
  }
  return {std::move(state), residual, values[1]};
}

SpectrumResult spectrum(const Superoperator& L, int k, const SpectrumOptions& opt) {
  const int n = L.size();
  if (k < 2 || k > n) {
    std::ostringstream os;
    os << "spectrum needs 2 <= k <= d^2 (k = " << k << ", d^2 = " << n << ")";
    fail(ErrorCode::invalid_argument, os.str());
  }
  SpectrumResult out;
  std::vector<std::pair<Complex, CVector>> pairs;
  if (n <= kDenseLimit) {
    const CMatrix dense = CMatrix(L.matrix());
    Eigen::ComplexEigenSolver<CMatrix> es(dense, opt.eigenmatrices);
    if (es.info() != Eigen::Success) fail(ErrorCode::convergence, "dense eigensolver failed");
    for (int i = 0; i < n; ++i)
      pairs.emplace_back(es.eigenvalues()(i), opt.eigenmatrices ? CVector(es.eigenvectors().col(i)) : CVector());
  } else {
    const int nev = std::min(n - 2, std::max(k * opt.oversample, k + 8));
    detail::EigenPairs ep =
        detail::shift_invert_eigs(L.matrix(), Complex(kShift), nev, opt.eigenmatrices, opt.tol, opt.max_iterations);
    if (static_cast<int>(ep.values.size()) < k) {
      std::ostringstream os;
      os << "shift-invert Arnoldi converged " << ep.values.size() << " of " << nev << " eigenvalues after "
         << ep.iterations << " restarts";
      fail(ErrorCode::convergence, os.str());
    }
    for (std::size_t i = 0; i < ep.values.size(); ++i)
      pairs.emplace_back(ep.values[i], opt.eigenmatrices ? ep.vectors[i] : CVector());
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return by_abs_real(a.first, b.first); });
  for (int i = 0; i < k; ++i) {
    out.eigenvalues.push_back(pairs[i].first);
    if (opt.eigenmatrices) out.eigenmatrices.push_back(unvectorize(pairs[i].second, L.fock_dim()));
  }
  out.gap = std::abs(out.eigenvalues[1].real());
  return out;
}

}  // namespace kerrsim
