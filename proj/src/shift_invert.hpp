#pragma once

#include <vector>

#include "kerrsim/types.hpp"

namespace kerrsim::detail {

struct EigenPairs {
  std::vector<Complex> values;
  std::vector<CVector> vectors;
  int iterations = 0;
  int converged = 0;
};

/// Eigenpairs of A nearest to sigma, using ARPACK in shift-invert mode with a
/// sparse LU of (A - sigma I).
EigenPairs shift_invert_eigs(const SparseCMatrix& A, Complex sigma, int nev, bool vectors, double tol,
                             int max_iterations);

}  // namespace kerrsim::detail
