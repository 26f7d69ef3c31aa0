#pragma once

#include "kerrsim/types.hpp"

namespace kerrsim::detail {

struct KrylovStats {
  int substeps = 0;
  int rejected = 0;
  long matvecs = 0;
  double last_step = 0.0;
  double min_step = 0.0;
  double error_estimate = 0.0;
};

/// w = exp(t A) v by restarted Arnoldi with adaptive substeps (Expokit-style
/// local error control). `step_hint` carries the last accepted substep between
/// calls; pass 0 to let the first call estimate one.
CVector expmv(const SparseCMatrix& A, double a_norm, const CVector& v, double t, double tol, int krylov_dim,
              double& step_hint, KrylovStats& stats);

double inf_norm(const SparseCMatrix& A);

}  // namespace kerrsim::detail
