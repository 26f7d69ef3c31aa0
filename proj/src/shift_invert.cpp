#include "shift_invert.hpp"

#include <arpack/arpack.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include <Eigen/SparseLU>

#include "kerrsim/error.hpp"

namespace kerrsim::detail {

namespace {

// ARPACK keeps state in Fortran SAVE variables; calls must not overlap.
std::mutex& arpack_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

EigenPairs shift_invert_eigs(const SparseCMatrix& A, Complex sigma, int nev, bool vectors, double tol,
                             int max_iterations) {
  const int n = static_cast<int>(A.rows());
  if (nev < 1 || nev > n - 2) {
    std::ostringstream os;
    os << "shift-invert needs 1 <= nev <= n - 2 (nev = " << nev << ", n = " << n << ")";
    fail(ErrorCode::invalid_argument, os.str());
  }

  SparseCMatrix shifted = A;
  for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
  shifted.makeCompressed();
  Eigen::SparseLU<SparseCMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) fail(ErrorCode::convergence, "sparse LU of (L - sigma) failed: " + lu.lastErrorMessage());

  const int ncv = std::min(n, std::max(2 * nev + 1, 20));
  const int lworkl = 3 * ncv * ncv + 5 * ncv;
  std::vector<Complex> resid(n), v(static_cast<std::size_t>(n) * ncv), workd(3 * static_cast<std::size_t>(n)),
      workl(lworkl), workev(2 * ncv);
  std::vector<double> rwork(ncv);
  std::vector<a_int> iparam(11, 0), ipntr(14, 0);
  iparam[0] = 1;
  iparam[2] = max_iterations;
  iparam[6] = 3;
  // Deterministic start vector.
  for (int i = 0; i < n; ++i) resid[i] = Complex(1.0 + 0.25 * std::sin(0.7 * i), 0.25 * std::cos(1.3 * i));

  std::lock_guard<std::mutex> guard(arpack_mutex());
  a_int ido = 0, info = 1;
  CVector x(n), y(n);
  while (true) {
    arpack::naupd(ido, arpack::bmat::identity, n, arpack::which::largest_magnitude, nev, tol, resid.data(), ncv,
                  v.data(), n, iparam.data(), ipntr.data(), workd.data(), workl.data(), lworkl, rwork.data(), info);
    if (ido == -1 || ido == 1) {
      Complex* in = workd.data() + ipntr[0] - 1;
      Complex* out = workd.data() + ipntr[1] - 1;
      x = Eigen::Map<CVector>(in, n);
      y = lu.solve(x);
      Eigen::Map<CVector>(out, n) = y;
      continue;
    }
    break;
  }
  if (info < 0 || info == 1) {
    std::ostringstream os;
    os << "ARPACK znaupd failed: info = " << info << ", iterations = " << iparam[2] << ", converged = " << iparam[4]
       << " of " << nev;
    fail(ErrorCode::convergence, os.str());
  }

  EigenPairs out;
  out.iterations = iparam[2];
  out.converged = iparam[4];
  std::vector<a_int> select(ncv, 0);
  std::vector<Complex> d(nev + 1), z(vectors ? static_cast<std::size_t>(n) * nev : 1);
  a_int neupd_info = 0;
  arpack::neupd(vectors ? 1 : 0, arpack::howmny::ritz_vectors, select.data(), d.data(), z.data(), n, sigma,
                workev.data(), arpack::bmat::identity, n, arpack::which::largest_magnitude, nev, tol, resid.data(), ncv,
                v.data(), n, iparam.data(), ipntr.data(), workd.data(), workl.data(), lworkl, rwork.data(), neupd_info);
  if (neupd_info != 0) {
    std::ostringstream os;
    os << "ARPACK zneupd failed: info = " << neupd_info;
    fail(ErrorCode::convergence, os.str());
  }
  const int got = std::min<int>(nev, iparam[4]);
  for (int k = 0; k < got; ++k) {
    out.values.push_back(d[k]);
    if (vectors) out.vectors.emplace_back(Eigen::Map<CVector>(z.data() + static_cast<std::size_t>(k) * n, n));
  }
  return out;
}

}  // namespace kerrsim::detail
