#pragma once

#include "kerrsim/params.hpp"
#include "kerrsim/types.hpp"

namespace kerrsim {

/// Dense operator on the truncated Fock space {|0>, ..., |d-1>}.
class FockOperator {
 public:
  explicit FockOperator(CMatrix entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& matrix() const { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }

  FockOperator adjoint() const { return FockOperator(entries_.adjoint()); }
  /// max |A - A^dagger| over entries.
  double hermiticity_error() const;

  friend FockOperator operator*(const FockOperator& a, const FockOperator& b) {
    return FockOperator(a.entries_ * b.entries_);
  }
  friend FockOperator operator+(const FockOperator& a, const FockOperator& b) {
    return FockOperator(a.entries_ + b.entries_);
  }
  friend FockOperator operator-(const FockOperator& a, const FockOperator& b) {
    return FockOperator(a.entries_ - b.entries_);
  }

 private:
  CMatrix entries_;
};

/// <n-1|a|n> = sqrt(n). Throws invalid_dimension for d < 1.
FockOperator annihilation(int d);
FockOperator creation(int d);
FockOperator number_operator(int d);
FockOperator identity_operator(int d);

/// H = delta a^dag a + i E (a^dag - a) + (U/2) a^dag a^dag a a in the pump frame.
FockOperator build_hamiltonian(const ModelParams& p, int d);

/// Photon number the truncation has to accommodate: N times the largest of
/// the upper bistability root n_+ and the mean-field roots at p.epsilon.
double predicted_occupation(const ModelParams& p);

/// n_max = ceil(3 * predicted_occupation + 20). The basis dimension is n_max + 1.
int choose_truncation(const ModelParams& p);

}  // namespace kerrsim
