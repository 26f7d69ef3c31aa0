#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kerrsim/error.hpp"
#include "kerrsim/exactness.hpp"

namespace kerrsim {

namespace {

// Lanczos coefficients for g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

Complex gamma_right(Complex z) {
  // Valid for Re z >= 1/2.
  z -= 1.0;
  Complex series = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) series += kLanczos[i] / (z + static_cast<double>(i));
  const Complex t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::exp((z + 0.5) * std::log(t) - t) * series;
}

}  // namespace

Complex complex_gamma(Complex z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real())) {
    std::ostringstream os;
    os << "Gamma has a pole at z = " << z.real();
    fail(ErrorCode::pole, os.str());
  }
  if (z.real() < 0.5) {
    return std::numbers::pi / (std::sin(std::numbers::pi * z) * gamma_right(1.0 - z));
  }
  return gamma_right(z);
}

Complex pochhammer(Complex z, int n) {
  if (n < 0) fail(ErrorCode::invalid_argument, "pochhammer order must be >= 0");
  Complex out = 1.0;
  for (int k = 0; k < n; ++k) out *= z + static_cast<double>(k);
  return out;
}

}  // namespace kerrsim
