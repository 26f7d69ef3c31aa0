#pragma once

#include <cmath>

namespace kerrsim {

/// Physical parameters of the driven Kerr cavity.
///
/// The pump and interaction actually entering the Hamiltonian follow the
/// thermodynamic-limit scaling: pump() = sqrt(N) * epsilon and
/// interaction() = u / N. Only the scaled values are stored, so the two
/// can never drift apart.
struct ModelParams {
  double delta = -2.0;    // detuning
  double kappa = 0.5;     // loss rate, > 0
  double u = 1.0;         // scaled Kerr interaction, >= 0 (0 is the linear cavity)
  double epsilon = 0.5;   // scaled pump amplitude, >= 0
  double N = 1.0;         // scale parameter, >= 1

  double pump() const { return std::sqrt(N) * epsilon; }
  double interaction() const { return u / N; }

  /// Throws Error(invalid_parameter) naming the first offending field.
  void validate() const;

  ModelParams with_epsilon(double eps) const {
    ModelParams p = *this;
    p.epsilon = eps;
    return p;
  }
  ModelParams with_scale(double scale) const {
    ModelParams p = *this;
    p.N = scale;
    return p;
  }
};

}  // namespace kerrsim
