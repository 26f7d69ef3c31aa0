#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kerrsim/error.hpp"
#include "kerrsim/exactness.hpp"

namespace kerrsim {

namespace {

class Real {
 public:
  explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Real(const Real&) = delete;
  Real& operator=(const Real&) = delete;
  ~Real() { mpfr_clear(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

// Complex number on a pair of MPFR reals; just the operations the series needs.
class MpComplex {
 public:
  explicit MpComplex(mpfr_prec_t prec) : re_(prec), im_(prec), t1_(prec), t2_(prec), t3_(prec) {}

  void set(Complex z) {
    mpfr_set_d(re_.get(), z.real(), MPFR_RNDN);
    mpfr_set_d(im_.get(), z.imag(), MPFR_RNDN);
  }
  void set(const MpComplex& o) {
    mpfr_set(re_.get(), o.re_.get(), MPFR_RNDN);
    mpfr_set(im_.get(), o.im_.get(), MPFR_RNDN);
  }
  void add(const MpComplex& o) {
    mpfr_add(re_.get(), re_.get(), o.re_.get(), MPFR_RNDN);
    mpfr_add(im_.get(), im_.get(), o.im_.get(), MPFR_RNDN);
  }
  void add_real(double x) { mpfr_add_d(re_.get(), re_.get(), x, MPFR_RNDN); }
  void mul(const MpComplex& o) {
    // (a + ib)(c + id)
    mpfr_mul(t1_.get(), re_.get(), o.re_.get(), MPFR_RNDN);
    mpfr_mul(t2_.get(), im_.get(), o.im_.get(), MPFR_RNDN);
    mpfr_mul(t3_.get(), re_.get(), o.im_.get(), MPFR_RNDN);
    mpfr_mul(im_.get(), im_.get(), o.re_.get(), MPFR_RNDN);
    mpfr_add(im_.get(), im_.get(), t3_.get(), MPFR_RNDN);
    mpfr_sub(re_.get(), t1_.get(), t2_.get(), MPFR_RNDN);
  }
  void div(const MpComplex& o) {
    // multiply by conj(o) / |o|^2
    mpfr_sqr(t1_.get(), o.re_.get(), MPFR_RNDN);
    mpfr_sqr(t2_.get(), o.im_.get(), MPFR_RNDN);
    mpfr_add(t1_.get(), t1_.get(), t2_.get(), MPFR_RNDN);  // |o|^2
    mpfr_mul(t2_.get(), re_.get(), o.re_.get(), MPFR_RNDN);
    mpfr_mul(t3_.get(), im_.get(), o.im_.get(), MPFR_RNDN);
    mpfr_add(t2_.get(), t2_.get(), t3_.get(), MPFR_RNDN);  // new re * |o|^2
    mpfr_mul(t3_.get(), im_.get(), o.re_.get(), MPFR_RNDN);
    mpfr_mul(im_.get(), re_.get(), o.im_.get(), MPFR_RNDN);
    mpfr_sub(im_.get(), t3_.get(), im_.get(), MPFR_RNDN);
    mpfr_div(im_.get(), im_.get(), t1_.get(), MPFR_RNDN);
    mpfr_div(re_.get(), t2_.get(), t1_.get(), MPFR_RNDN);
  }
  void mul_real(double x) {
    mpfr_mul_d(re_.get(), re_.get(), x, MPFR_RNDN);
    mpfr_mul_d(im_.get(), im_.get(), x, MPFR_RNDN);
  }
  // log10 |z|, finite for z != 0.
  double log10_abs() const {
    mpfr_hypot(const_cast<mpfr_ptr>(t1_.get()), re_.get(), im_.get(), MPFR_RNDN);
    if (mpfr_zero_p(t1_.get())) return -1e300;
    long exp = 0;
    const double mant = mpfr_get_d_2exp(&exp, t1_.get(), MPFR_RNDN);
    return std::log10(mant) + static_cast<double>(exp) * std::log10(2.0);
  }
  Complex to_complex() const { return {mpfr_get_d(re_.get(), MPFR_RNDN), mpfr_get_d(im_.get(), MPFR_RNDN)}; }

 private:
  Real re_, im_;
  mutable Real t1_;
  Real t2_, t3_;
};

bool non_positive_integer(Complex z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

mpfr_prec_t bits_for(double digits) { return static_cast<mpfr_prec_t>(std::ceil(digits * 3.321928094887362) + 16); }

int default_digits(Complex c) { return static_cast<int>(std::ceil(2.5 * std::cbrt(std::abs(c) / 2.0) + 30.0)); }

struct SeriesSum {
  double log10_max_term = 0.0;
  double log10_sum = 0.0;
  int terms = 0;
};

// Accumulates the series into `sum`; `sum` must be constructed at `prec`.
SeriesSum sum_series(Complex a, Complex b, Complex c, mpfr_prec_t prec, const HyperOptions& opt, MpComplex& sum) {
  if (non_positive_integer(a) || non_positive_integer(b))
    fail(ErrorCode::pole, "0F2 parameters must not be non-positive integers");
  MpComplex term(prec), ratio(prec), denom(prec), cc(prec), shifted(prec);
  term.set(Complex(1.0));
  sum.set(Complex(1.0));
  cc.set(c);
  SeriesSum s;
  double log10_max_sum = 0.0;
  const double log10_tol = std::log10(opt.rel_tol);
  int quiet = 0;
  int k = 0;
  if (c == Complex(0.0)) {
    s.terms = 1;
    return s;
  }
  for (; k < opt.max_terms; ++k) {
    // term *= c / ((a + k)(b + k)(k + 1))
    denom.set(a + static_cast<double>(k));
    shifted.set(b + static_cast<double>(k));
    denom.mul(shifted);
    denom.mul_real(static_cast<double>(k + 1));
    ratio.set(cc);
    ratio.div(denom);
    term.mul(ratio);
    sum.add(term);

    const double lt = term.log10_abs();
    const double ls = sum.log10_abs();
    s.log10_max_term = std::max(s.log10_max_term, lt);
    log10_max_sum = std::max(log10_max_sum, ls);
    const bool shrinking = ratio.log10_abs() < std::log10(0.5);
    if (lt < log10_tol + log10_max_sum && shrinking) {
      if (++quiet >= opt.quiet_terms) break;
    } else {
      quiet = 0;
    }
  }
  if (k >= opt.max_terms) {
    std::ostringstream os;
    os << "0F2 series did not settle within " << opt.max_terms << " terms";
    fail(ErrorCode::precision, os.str());
  }
  s.terms = k + 2;
  s.log10_sum = sum.log10_abs();
  return s;
}

}  // namespace

HyperResult hyper0F2(Complex a, Complex b, Complex c, const HyperOptions& opt) {
  const int digits = opt.digits > 0 ? opt.digits : default_digits(c);
  const mpfr_prec_t prec = bits_for(digits);
  MpComplex sum(prec);
  const SeriesSum s = sum_series(a, b, c, prec, opt, sum);
  HyperResult out;
  out.value = sum.to_complex();
  out.terms = s.terms;
  out.precision_bits = prec;
  out.digits = std::min<double>(digits - std::max(0.0, s.log10_max_term - s.log10_sum), digits);
  if (out.digits < opt.required_digits) {
    std::ostringstream os;
    os << "0F2 lost " << (s.log10_max_term - s.log10_sum) << " digits to cancellation at " << digits
       << " working digits; about " << static_cast<int>(std::ceil(s.log10_max_term - s.log10_sum + opt.required_digits))
       << " are required";
    fail(ErrorCode::precision, os.str());
  }
  return out;
}

HyperRatio hyper0F2_ratio(Complex a1, Complex b1, Complex a0, Complex b0, double c, int max_digits) {
  HyperOptions opt;
  opt.digits = default_digits(Complex(c));
  opt.required_digits = 0.0;
  while (true) {
    const mpfr_prec_t prec = bits_for(opt.digits);
    MpComplex num(prec), den(prec);
    const SeriesSum sn = sum_series(a1, b1, Complex(c), prec, opt, num);
    const SeriesSum sd = sum_series(a0, b0, Complex(c), prec, opt, den);
    const double lost = std::max({0.0, sn.log10_max_term - sn.log10_sum, sd.log10_max_term - sd.log10_sum});
    const double achieved = opt.digits - lost;
    if (achieved >= 17.0) {
      num.div(den);
      return {num.to_complex(), achieved, static_cast<long>(prec)};
    }
    if (opt.digits >= max_digits) {
      std::ostringstream os;
      os << "0F2 ratio at |c| = " << c << " needs more than " << max_digits << " digits (lost " << lost << ")";
      fail(ErrorCode::precision, os.str());
    }
    opt.digits = std::min(max_digits, static_cast<int>(std::ceil(lost + 40.0)) + opt.digits);
  }
}

}  // namespace kerrsim
