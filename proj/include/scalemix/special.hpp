#pragma once

// Log-scale special functions used by the density normalisers.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "scalemix/quadrature.hpp"

namespace scalemix {

inline double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// log K_v(x) for real order v and x > 0, evaluated from the integral
// representation K_v(x) = int_0^inf exp(-x cosh t) cosh(v t) dt.  Working in
// the log domain keeps the result usable far beyond the underflow point of
// the direct Bessel evaluation.
inline double log_bessel_k(double order, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("log_bessel_k: x must be positive");
  const double v = std::abs(order);
  auto g = [&](double t) {
    const double y = v * t;
    const double log_cosh = y + std::log1p(std::exp(-2.0 * y)) - std::numbers::ln2;
    return log_cosh - x * std::cosh(t);
  };
  return log_integral_exp(g, 0.0, kInf, 1e-13);
}

// log of the multivariate gamma function Gamma_r(a).
inline double log_mv_gamma(int r, double a) {
  double out = 0.25 * r * (r - 1) * std::log(std::numbers::pi);
  for (int i = 1; i <= r; ++i) out += std::lgamma(a + 0.5 * (1.0 - i));
  return out;
}

}  // namespace scalemix
