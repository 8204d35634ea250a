#pragma once

// Scalar sampling primitives shared by the mixing families and the
// matrix-variate samplers.  All samplers draw from a caller-owned URBG so
// that chains are reproducible from a single seed.

#include <cmath>
#include <random>
#include <stdexcept>

#include "scalemix/errors.hpp"

namespace scalemix {

template <class Rng>
double draw_uniform(Rng& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double u;
  do {
    u = u01(rng);
  } while (u <= 0.0);
  return u;
}

template <class Rng>
double draw_normal(Rng& rng, double mean = 0.0, double sd = 1.0) {
  std::normal_distribution<double> n(mean, sd);
  return n(rng);
}

// Gamma(shape, rate); rejects the zero draws that the library generator can
// produce by underflow at small shapes, since downstream code divides by them.
template <class Rng>
double draw_gamma(Rng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("draw_gamma: shape and rate must be positive");
  std::gamma_distribution<double> g(shape, 1.0 / rate);
  double x;
  do {
    x = g(rng);
  } while (!(x > 0.0));
  return x;
}

namespace detail {

inline double gig_log_concave(double alpha, double lambda, double x) {
  return -alpha * (std::cosh(x) - 1.0) - lambda * (std::expm1(x) - x);
}

inline double gig_log_concave_deriv(double alpha, double lambda, double x) {
  return -alpha * std::sinh(x) - lambda * std::expm1(x);
}

// Devroye (2012) generator for the two-parameter GIG body
// f(x) proportional to x^{lambda-1} exp(-omega (x + 1/x) / 2), lambda >= 0.
// Uses the log-concave density of log(x/mode) under a uniform/exponential
// three-piece hat; acceptance is bounded below uniformly in the parameters.
template <class Rng>
double gig_two_param(Rng& rng, double lambda, double omega) {
  const double alpha = std::sqrt(omega * omega + lambda * lambda) - lambda;

  double t;
  double v = -gig_log_concave(alpha, lambda, 1.0);
  if (v >= 0.5 && v <= 2.0)
    t = 1.0;
  else if (v > 2.0)
    t = std::sqrt(2.0 / (alpha + lambda));
  else
    t = std::log(4.0 / (alpha + 2.0 * lambda));

  double s;
  v = -gig_log_concave(alpha, lambda, -1.0);
  if (v >= 0.5 && v <= 2.0) {
    s = 1.0;
  } else if (v > 2.0) {
    s = std::sqrt(4.0 / (alpha * std::cosh(1.0) + lambda));
  } else {
    const double c = std::log(1.0 + 1.0 / alpha + std::sqrt(1.0 / (alpha * alpha) + 2.0 / alpha));
    s = (lambda > 0.0) ? std::min(1.0 / lambda, c) : c;
  }

  const double eta = -gig_log_concave(alpha, lambda, t);
  const double zeta = -gig_log_concave_deriv(alpha, lambda, t);
  const double theta = -gig_log_concave(alpha, lambda, -s);
  const double xi = gig_log_concave_deriv(alpha, lambda, -s);
  const double p = 1.0 / xi;
  const double r = 1.0 / zeta;
  const double t_shift = t - r * eta;
  const double s_shift = s - p * theta;
  const double q = t_shift + s_shift;

  for (long attempt = 0; attempt < 100000000L; ++attempt) {
    const double u = draw_uniform(rng);
    const double w = draw_uniform(rng);
    const double vv = draw_uniform(rng);
    double x;
    if (u < q / (p + q + r))
      x = -s_shift + q * vv;
    else if (u < (q + r) / (p + q + r))
      x = t_shift + r * std::log(1.0 / vv);
    else
      x = -s_shift - p * std::log(1.0 / vv);
    // piecewise hat: unit plateau, then the tangent-line exponentials of the
    // log-density at t and -s, which cross height 1 exactly at the shifted
    // boundaries t_shift and -s_shift
    double hat;
    if (x >= -s_shift && x <= t_shift)
      hat = 1.0;
    else if (x > t_shift)
      hat = std::exp(-zeta * (x - t_shift));
    else
      hat = std::exp(xi * (x + s_shift));
    if (w * hat <= std::exp(gig_log_concave(alpha, lambda, x)))
      return (lambda / omega + std::sqrt(1.0 + (lambda / omega) * (lambda / omega))) * std::exp(x);
  }
  throw std::runtime_error("gig_two_param: rejection loop failed to terminate");
}

}  // namespace detail

// GIG(order, a, b): density proportional to x^{order-1} exp(-(a x + b / x)/2).
// The boundary cases a = 0 (inverted gamma, order < 0) and b = 0 (gamma,
// order > 0) arise from exponential tilting at s = 0 and are handled exactly.
template <class Rng>
double draw_gig(Rng& rng, double order, double a, double b) {
  if (a < 0.0 || b < 0.0) throw std::invalid_argument("draw_gig: a and b must be nonnegative");
  if (a == 0.0 && b == 0.0)
    throw UnsupportedCaseError("draw_gig: a and b cannot both be zero");
  if (b == 0.0) {
    if (!(order > 0.0))
      throw UnsupportedCaseError("draw_gig: b = 0 requires a positive order");
    return draw_gamma(rng, order, 0.5 * a);
  }
  if (a == 0.0) {
    if (!(order < 0.0))
      throw UnsupportedCaseError("draw_gig: a = 0 requires a negative order");
    return 1.0 / draw_gamma(rng, -order, 0.5 * b);
  }
  if (order < 0.0) return 1.0 / draw_gig(rng, -order, b, a);
  const double omega = std::sqrt(a * b);
  return std::sqrt(b / a) * detail::gig_two_param(rng, order, omega);
}

}  // namespace scalemix
