#include "krylov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "kerrsim/error.hpp"

namespace kerrsim::detail {

namespace {

constexpr double kSafety = 0.9;
constexpr double kAcceptFactor = 1.2;
constexpr double kMinStep = 1e-12;

}  // namespace

double inf_norm(const SparseCMatrix& A) {
  RVector rows = RVector::Zero(A.rows());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseCMatrix::InnerIterator it(A, k); it; ++it) rows(it.row()) += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

CVector expmv(const SparseCMatrix& A, double a_norm, const CVector& v, double t, double tol, int krylov_dim,
              double& step_hint, KrylovStats& stats) {
  const Eigen::Index n = v.size();
  const int m = static_cast<int>(std::min<Eigen::Index>(krylov_dim, n));
  CVector w = v;
  double beta = w.norm();
  if (beta == 0.0 || t == 0.0) return w;
  if (a_norm == 0.0) return w;

  if (step_hint <= 0.0) {
    const double xm = 1.0 / m;
    const double fact = std::pow((m + 1) / std::numbers::e, m + 1) * std::sqrt(2.0 * std::numbers::pi * (m + 1));
    step_hint = (1.0 / a_norm) * std::pow((fact * tol) / (4.0 * beta * a_norm), xm);
  }

  const double break_tol = 1e-14 * a_norm;
  CMatrix V(n, m + 1);
  CMatrix H(m + 2, m + 2);
  CVector p(n);
  double t_now = 0.0;
  stats.min_step = stats.min_step > 0.0 ? stats.min_step : std::numeric_limits<double>::infinity();

  while (t_now < t) {
    const bool clipped = (t - t_now) < step_hint;
    double tau = std::min(t - t_now, step_hint);
    H.setZero();
    V.col(0) = w / beta;
    bool breakdown = false;
    int mb = m;
    for (int j = 0; j < m; ++j) {
      p.noalias() = A * V.col(j);
      ++stats.matvecs;
      for (int i = 0; i <= j; ++i) {
        const Complex h = V.col(i).dot(p);
        H(i, j) = h;
        p.noalias() -= h * V.col(i);
      }
      const double s = p.norm();
      if (s < break_tol) {
        breakdown = true;
        mb = j + 1;
        tau = t - t_now;
        break;
      }
      H(j + 1, j) = s;
      V.col(j + 1) = p / s;
    }
    double avnorm = 0.0;
    int mx = mb;
    if (!breakdown) {
      H(m + 1, m) = 1.0;
      p.noalias() = A * V.col(m);
      ++stats.matvecs;
      avnorm = p.norm();
      mx = m + 2;
    }

    CMatrix F;
    const int rejected_before = stats.rejected;
    double err = 0.0;
    double order = 1.0 / m;
    while (true) {
      F = (tau * H.topLeftCorner(mx, mx)).exp();
      if (breakdown) {
        err = 0.0;
        break;
      }
      const double p1 = std::abs(beta * F(m, 0));
      const double p2 = std::abs(beta * F(m + 1, 0) * avnorm);
      if (p1 > 10.0 * p2) {
        err = p2;
        order = 1.0 / m;
      } else if (p1 > p2) {
        err = p1 * p2 / (p1 - p2);
        order = 1.0 / m;
      } else {
        err = p1;
        order = 1.0 / (m - 1);
      }
      if (err <= kAcceptFactor * tau * tol) break;
      ++stats.rejected;
      tau = kSafety * tau * std::pow(tau * tol / err, order);
      const double scale = std::pow(10.0, std::floor(std::log10(tau)) - 1.0);
      tau = std::ceil(tau / scale) * scale;
      if (tau < kMinStep) {
        std::ostringstream os;
        os << "Krylov substep fell below " << kMinStep << " (error estimate " << err << ")";
        fail(ErrorCode::stiffness, os.str());
      }
    }

    const int keep = breakdown ? mb : m + 1;
    w.noalias() = V.leftCols(keep) * (beta * F.col(0).head(keep));
    beta = w.norm();
    t_now += tau;
    ++stats.substeps;
    stats.last_step = tau;
    stats.min_step = std::min(stats.min_step, tau);
    stats.error_estimate = std::max(stats.error_estimate, err);

    if (!breakdown) {
      double next = kSafety * tau * std::pow(tau * tol / std::max(err, 1e-300), order);
      next = std::min(next, 10.0 * tau);
      const double scale = std::pow(10.0, std::floor(std::log10(next)) - 1.0);
      next = std::ceil(next / scale) * scale;
      // A step shortened only to land on t says nothing about the step size.
      if (!(clipped && next < step_hint && stats.rejected == rejected_before)) step_hint = next;
    }
  }
  return w;
}

}  // namespace kerrsim::detail
