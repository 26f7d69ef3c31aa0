#pragma once

#include "kerrsim/params.hpp"
#include "kerrsim/types.hpp"

namespace kerrsim {

/// Parameters of the closed-form steady state of the Kerr cavity.
struct ExactSolutionParams {
  Complex xi;  // 2 E / (i U)
  Complex x;   // 2 (i delta + kappa) / (i U)

  static ExactSolutionParams from(const ModelParams& p);
  /// Argument of the 0F2 series, 2 |xi|^2.
  double series_argument() const;
};

/// Gamma(z) for complex z: Lanczos approximation, reflection for Re z < 1/2.
/// Throws pole at non-positive integers.
Complex complex_gamma(Complex z);

/// Rising factorial (z)_n = Gamma(z + n) / Gamma(z).
Complex pochhammer(Complex z, int n);

struct HyperResult {
  Complex value;
  /// Estimated correct significant digits after cancellation.
  double digits = 0.0;
  int terms = 0;
  long precision_bits = 0;
};

struct HyperOptions {
  /// Working precision in decimal digits; 0 picks 2.5 c^(1/3) + 30.
  int digits = 0;
  double rel_tol = 1e-15;
  int quiet_terms = 50;
  int max_terms = 200000;
  /// Minimum digits that must survive cancellation, else precision error.
  double required_digits = 15.0;
};

/// 0F2(;a,b;c) = sum_k c^k / ((a)_k (b)_k k!) by forward recurrence on the
/// term ratio in MPFR arithmetic. Summation stops once `quiet_terms`
/// consecutive terms fall below rel_tol times the largest partial sum seen.
HyperResult hyper0F2(Complex a, Complex b, Complex c, const HyperOptions& opt = {});

/// Ratio 0F2(a1,b1;c) / 0F2(a0,b0;c), evaluated in one working precision,
/// retrying with more digits when cancellation eats the result. This is
/// the quantity the moment formula actually needs.
struct HyperRatio {
  Complex value;
  double digits = 0.0;
  long precision_bits = 0;
};
HyperRatio hyper0F2_ratio(Complex a1, Complex b1, Complex a0, Complex b0, double c, int max_digits = 4000);

/// Moment <(a^dag)^n a^m> of the exact steady state with the sqrt(2) prefactor
/// of the printed formula left in; raw_moment(0, 0, p) is that prefactor.
Complex raw_moment(int n, int m, const ModelParams& p);

/// Normalized moment raw_moment(n, m) / raw_moment(0, 0), so <1> = 1.
Complex exact_moment(int n, int m, const ModelParams& p);

}  // namespace kerrsim
