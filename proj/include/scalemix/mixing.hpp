#pragma once

// Mixing densities on (0, inf) for scale mixtures of normals.  Each family
// carries enough analytic structure to classify its behaviour near the
// origin, decide moment finiteness, and sample from its exponentially
// tilted form u^{d/2} exp(-s u / 2) h(u).

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "scalemix/distributions.hpp"
#include "scalemix/errors.hpp"
#include "scalemix/quadrature.hpp"
#include "scalemix/special.hpp"

namespace scalemix {

struct MixingDensity;

struct GammaMix {
  double shape, rate;
};
struct BetaMix {
  double shape_a, shape_b;
};
struct WeibullMix {  // u^{shape-1} exp(-rate u^shape)
  double shape, rate;
};
struct FisherFMix {
  double df1, df2;
};
struct ShiftedParetoMix {  // tail scale^tail / (u + scale)^{tail+1}
  double scale, tail;
};
struct InvGammaMix {  // u^{-shape-1} exp(-rate/u)
  double shape, rate;
};
struct GigMix {  // u^{order-1} exp(-(a u + b/u)/2)
  double order, a, b;
};
struct LogNormalMix {
  double log_mean, log_var;
};
struct FrechetMix {  // u^{-shape-1} exp(-(scale/u)^shape)
  double shape, scale;
};
struct MixtureMix {
  std::vector<double> weights;
  std::vector<MixingDensity> parts;
};
struct TruncatedMix {
  std::shared_ptr<const MixingDensity> inner;
  double floor = 0.0;
  double log_tail_mass = 0.0;  // log of inner mass on [floor, inf)
};

struct OriginClass {
  enum class Kind { ZeroNearOrigin, Polynomial, FasterThanPolynomial };
  Kind kind = Kind::Polynomial;
  double value = 0.0;  // support floor delta, or the power c

  static OriginClass zero_near_origin(double delta) {
    return {Kind::ZeroNearOrigin, delta};
  }
  static OriginClass polynomial(double c) { return {Kind::Polynomial, c}; }
  static OriginClass faster_than_polynomial() {
    return {Kind::FasterThanPolynomial, 0.0};
  }
};

using MixingFamily =
    std::variant<GammaMix, BetaMix, WeibullMix, FisherFMix, ShiftedParetoMix,
                 InvGammaMix, GigMix, LogNormalMix, FrechetMix, MixtureMix,
                 TruncatedMix>;

double log_density(const MixingDensity& h, double u);
std::pair<double, double> support(const MixingDensity& h);

struct MixingDensity {
  MixingFamily family;

  static MixingDensity gamma(double shape, double rate) {
    require(shape > 0.0 && rate > 0.0, "gamma mixing: parameters must be positive");
    return {GammaMix{shape, rate}};
  }
  static MixingDensity beta(double shape_a, double shape_b) {
    require(shape_a > 0.0 && shape_b > 0.0, "beta mixing: parameters must be positive");
    return {BetaMix{shape_a, shape_b}};
  }
  static MixingDensity weibull(double shape, double rate) {
    require(shape > 0.0 && rate > 0.0, "weibull mixing: parameters must be positive");
    return {WeibullMix{shape, rate}};
  }
  static MixingDensity fisher_f(double df1, double df2) {
    require(df1 > 0.0 && df2 > 0.0, "f mixing: degrees of freedom must be positive");
    return {FisherFMix{df1, df2}};
  }
  static MixingDensity shifted_pareto(double scale, double tail) {
    require(scale > 0.0 && tail > 0.0, "pareto mixing: parameters must be positive");
    return {ShiftedParetoMix{scale, tail}};
  }
  static MixingDensity inverted_gamma(double shape, double rate) {
    require(shape > 0.0 && rate > 0.0, "ig mixing: parameters must be positive");
    return {InvGammaMix{shape, rate}};
  }
  static MixingDensity gig(double order, double a, double b) {
    require(a > 0.0 && b > 0.0, "gig mixing: a and b must be positive");
    require(std::isfinite(order), "gig mixing: order must be finite");
    return {GigMix{order, a, b}};
  }
  static MixingDensity log_normal(double log_mean, double log_var) {
    require(log_var > 0.0, "lognormal mixing: variance must be positive");
    require(std::isfinite(log_mean), "lognormal mixing: location must be finite");
    return {LogNormalMix{log_mean, log_var}};
  }
  static MixingDensity frechet(double shape, double scale) {
    require(shape > 0.0 && scale > 0.0, "frechet mixing: parameters must be positive");
    return {FrechetMix{shape, scale}};
  }
  static MixingDensity mixture(std::vector<double> weights,
                               std::vector<MixingDensity> parts) {
    require(!parts.empty() && weights.size() == parts.size(),
            "mixture mixing: weights and components must match and be nonempty");
    double total = 0.0;
    for (double w : weights) {
      require(w > 0.0 && std::isfinite(w), "mixture mixing: weights must be positive");
      total += w;
    }
    require(std::abs(total - 1.0) < 1e-8, "mixture mixing: weights must sum to one");
    for (double& w : weights) w /= total;
    return {MixtureMix{std::move(weights), std::move(parts)}};
  }
  static MixingDensity truncated(MixingDensity inner, double floor);

 private:
  static void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  }
};

inline std::pair<double, double> support(const MixingDensity& h) {
  return std::visit(
      [](const auto& fam) -> std::pair<double, double> {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, BetaMix>) {
          return {0.0, 1.0};
        } else if constexpr (std::is_same_v<T, MixtureMix>) {
          double lo = kInf, hi = 0.0;
          for (const auto& part : fam.parts) {
            auto [l, u] = support(part);
            lo = std::min(lo, l);
            hi = std::max(hi, u);
          }
          return {lo, hi};
        } else if constexpr (std::is_same_v<T, TruncatedMix>) {
          return {fam.floor, support(*fam.inner).second};
        } else {
          return {0.0, kInf};
        }
      },
      h.family);
}

inline double log_density(const MixingDensity& h, double u) {
  if (!(u > 0.0) || !std::isfinite(u)) return -kInf;
  return std::visit(
      [u](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, GammaMix>) {
          return fam.shape * std::log(fam.rate) - std::lgamma(fam.shape) +
                 (fam.shape - 1.0) * std::log(u) - fam.rate * u;
        } else if constexpr (std::is_same_v<T, BetaMix>) {
          if (u >= 1.0) return -kInf;
          return -log_beta_fn(fam.shape_a, fam.shape_b) +
                 (fam.shape_a - 1.0) * std::log(u) +
                 (fam.shape_b - 1.0) * std::log1p(-u);
        } else if constexpr (std::is_same_v<T, WeibullMix>) {
          return std::log(fam.shape * fam.rate) + (fam.shape - 1.0) * std::log(u) -
                 fam.rate * std::pow(u, fam.shape);
        } else if constexpr (std::is_same_v<T, FisherFMix>) {
          const double h1 = 0.5 * fam.df1, h2 = 0.5 * fam.df2;
          return h1 * std::log(fam.df1 / fam.df2) - log_beta_fn(h1, h2) +
                 (h1 - 1.0) * std::log(u) -
                 (h1 + h2) * std::log1p(fam.df1 / fam.df2 * u);
        } else if constexpr (std::is_same_v<T, ShiftedParetoMix>) {
          return std::log(fam.tail) + fam.tail * std::log(fam.scale) -
                 (fam.tail + 1.0) * std::log(u + fam.scale);
        } else if constexpr (std::is_same_v<T, InvGammaMix>) {
          return fam.shape * std::log(fam.rate) - std::lgamma(fam.shape) -
                 (fam.shape + 1.0) * std::log(u) - fam.rate / u;
        } else if constexpr (std::is_same_v<T, GigMix>) {
          return -std::numbers::ln2 - log_bessel_k(fam.order, std::sqrt(fam.a * fam.b)) +
                 0.5 * fam.order * std::log(fam.a / fam.b) +
                 (fam.order - 1.0) * std::log(u) - 0.5 * (fam.a * u + fam.b / u);
        } else if constexpr (std::is_same_v<T, LogNormalMix>) {
          const double c = std::log(u) - fam.log_mean;
          return -std::log(u) - 0.5 * c * c / fam.log_var -
                 0.5 * std::log(2.0 * std::numbers::pi * fam.log_var);
        } else if constexpr (std::is_same_v<T, FrechetMix>) {
          return std::log(fam.shape) + fam.shape * std::log(fam.scale) -
                 (fam.shape + 1.0) * std::log(u) - std::pow(fam.scale / u, fam.shape);
        } else if constexpr (std::is_same_v<T, MixtureMix>) {
          double best = -kInf;
          std::vector<double> terms(fam.parts.size());
          for (std::size_t i = 0; i < fam.parts.size(); ++i) {
            terms[i] = std::log(fam.weights[i]) + log_density(fam.parts[i], u);
            best = std::max(best, terms[i]);
          }
          if (best == -kInf) return -kInf;
          double acc = 0.0;
          for (double t : terms) acc += std::exp(t - best);
          return best + std::log(acc);
        } else {  // TruncatedMix
          if (u < fam.floor) return -kInf;
          return log_density(*fam.inner, u) - fam.log_tail_mass;
        }
      },
      h.family);
}

namespace detail {

// log of the integrand of int u^power exp(-s u / 2) h(u) du on the log axis.
inline auto tilted_log_integrand(const MixingDensity& h, double power, double s) {
  return [&h, power, s](double t) {
    const double u = std::exp(t);
    return (power + 1.0) * t - 0.5 * s * u + log_density(h, u);
  };
}

inline double log_tilted_moment(const MixingDensity& h, double power, double s) {
  auto [lo, hi] = support(h);
  const double t_lo = lo > 0.0 ? std::log(lo) : -kInf;
  const double t_hi = hi < kInf ? std::log(hi) : kInf;
  return log_integral_exp(tilted_log_integrand(h, power, s), t_lo, t_hi);
}

}  // namespace detail

inline MixingDensity MixingDensity::truncated(MixingDensity inner, double floor) {
  require(floor > 0.0 && std::isfinite(floor),
          "truncated mixing: floor must be positive and finite");
  auto [lo, hi] = support(inner);
  require(floor < hi, "truncated mixing: floor is outside the inner support");
  TruncatedMix t;
  t.inner = std::make_shared<const MixingDensity>(std::move(inner));
  t.floor = floor;
  t.log_tail_mass =
      log_integral_exp(detail::tilted_log_integrand(*t.inner, 0.0, 0.0), std::log(floor),
                       hi < kInf ? std::log(hi) : kInf);
  require(std::isfinite(t.log_tail_mass),
          "truncated mixing: no mass above the requested floor");
  return {std::move(t)};
}

template <class Rng>
double sample_h(const MixingDensity& h, Rng& rng) {
  return std::visit(
      [&rng](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, GammaMix>) {
          return draw_gamma(rng, fam.shape, fam.rate);
        } else if constexpr (std::is_same_v<T, BetaMix>) {
          const double x = draw_gamma(rng, fam.shape_a, 1.0);
          const double y = draw_gamma(rng, fam.shape_b, 1.0);
          return x / (x + y);
        } else if constexpr (std::is_same_v<T, WeibullMix>) {
          const double e = -std::log(draw_uniform(rng));
          return std::pow(e / fam.rate, 1.0 / fam.shape);
        } else if constexpr (std::is_same_v<T, FisherFMix>) {
          const double g1 = draw_gamma(rng, 0.5 * fam.df1, 0.5);
          const double g2 = draw_gamma(rng, 0.5 * fam.df2, 0.5);
          return (g1 / fam.df1) / (g2 / fam.df2);
        } else if constexpr (std::is_same_v<T, ShiftedParetoMix>) {
          const double u = draw_uniform(rng);
          return fam.scale * (std::pow(u, -1.0 / fam.tail) - 1.0);
        } else if constexpr (std::is_same_v<T, InvGammaMix>) {
          return 1.0 / draw_gamma(rng, fam.shape, fam.rate);
        } else if constexpr (std::is_same_v<T, GigMix>) {
          return draw_gig(rng, fam.order, fam.a, fam.b);
        } else if constexpr (std::is_same_v<T, LogNormalMix>) {
          return std::exp(fam.log_mean + std::sqrt(fam.log_var) * draw_normal(rng));
        } else if constexpr (std::is_same_v<T, FrechetMix>) {
          const double u = draw_uniform(rng);
          return fam.scale * std::pow(-std::log(u), -1.0 / fam.shape);
        } else if constexpr (std::is_same_v<T, MixtureMix>) {
          std::discrete_distribution<std::size_t> pick(fam.weights.begin(),
                                                       fam.weights.end());
          return sample_h(fam.parts[pick(rng)], rng);
        } else {  // TruncatedMix
          for (long attempt = 0; attempt < 1000000L; ++attempt) {
            const double u = sample_h(*fam.inner, rng);
            if (u >= fam.floor) return u;
          }
          throw std::runtime_error("sample_h: truncation rejection failed to terminate");
        }
      },
      h.family);
}

inline OriginClass origin_class(const MixingDensity& h) {
  return std::visit(
      [](const auto& fam) -> OriginClass {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, GammaMix> || std::is_same_v<T, WeibullMix>) {
          return OriginClass::polynomial(fam.shape - 1.0);
        } else if constexpr (std::is_same_v<T, BetaMix>) {
          return OriginClass::polynomial(fam.shape_a - 1.0);
        } else if constexpr (std::is_same_v<T, FisherFMix>) {
          return OriginClass::polynomial(0.5 * (fam.df1 - 2.0));
        } else if constexpr (std::is_same_v<T, ShiftedParetoMix>) {
          return OriginClass::polynomial(0.0);
        } else if constexpr (std::is_same_v<T, InvGammaMix> ||
                             std::is_same_v<T, GigMix> ||
                             std::is_same_v<T, LogNormalMix> ||
                             std::is_same_v<T, FrechetMix>) {
          return OriginClass::faster_than_polynomial();
        } else if constexpr (std::is_same_v<T, MixtureMix>) {
          // A polynomial component dominates near the origin; otherwise every
          // component vanishes there and the mixture is treated as
          // faster-than-polynomial.
          bool any_poly = false;
          double c_min = kInf;
          for (const auto& part : fam.parts) {
            const OriginClass oc = origin_class(part);
            if (oc.kind == OriginClass::Kind::Polynomial) {
              any_poly = true;
              c_min = std::min(c_min, oc.value);
            }
          }
          if (any_poly) return OriginClass::polynomial(c_min);
          return OriginClass::faster_than_polynomial();
        } else {  // TruncatedMix
          return OriginClass::zero_near_origin(fam.floor);
        }
      },
      h.family);
}

// Whether int^inf u^q h(u) du converges in the upper tail.
inline bool tail_moment_finite(const MixingDensity& h, double q) {
  return std::visit(
      [q](const auto& fam) -> bool {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, FisherFMix>) {
          return q < 0.5 * fam.df2;
        } else if constexpr (std::is_same_v<T, ShiftedParetoMix>) {
          return q < fam.tail;
        } else if constexpr (std::is_same_v<T, InvGammaMix> ||
                             std::is_same_v<T, FrechetMix>) {
          return q < fam.shape;
        } else if constexpr (std::is_same_v<T, MixtureMix>) {
          for (const auto& part : fam.parts)
            if (!tail_moment_finite(part, q)) return false;
          return true;
        } else if constexpr (std::is_same_v<T, TruncatedMix>) {
          return tail_moment_finite(*fam.inner, q);
        } else {
          return true;  // exponential-type or bounded upper tail
        }
      },
      h.family);
}

// Whether E[U^q] is finite (origin and tail together); q may be negative.
inline bool moment_finite(const MixingDensity& h, double q) {
  if (!tail_moment_finite(h, q)) return false;
  const OriginClass oc = origin_class(h);
  if (oc.kind == OriginClass::Kind::Polynomial) return q + oc.value > -1.0;
  return true;
}

inline bool condition_m_holds(const MixingDensity& h, int d) {
  if (d < 1) throw std::invalid_argument("condition_m_holds: d must be >= 1");
  return tail_moment_finite(h, 0.5 * d);
}

// Parameters of the tilted latent draw u^{d/2} exp(-s u / 2) h(u).
struct PsiParams {
  double s = 0.0;
  int d = 1;
  MixingDensity h;
};

inline bool psi_closed_form(const MixingDensity& h) {
  return std::holds_alternative<GammaMix>(h.family) ||
         std::holds_alternative<InvGammaMix>(h.family) ||
         std::holds_alternative<GigMix>(h.family);
}

inline double log_psi_norm(const PsiParams& params) {
  return detail::log_tilted_moment(params.h, 0.5 * params.d, params.s);
}

// Rejection sampler with proposal h and unimodal acceptance weight
// u^{d/2} exp(-s u / 2); the envelope constant is the weight at the point of
// the support closest to d/s.  Requires s > 0 so the weight is bounded.
template <class Rng>
double sample_psi_rejection(const PsiParams& params, Rng& rng) {
  if (!(params.s > 0.0))
    throw UnsupportedCaseError(
        "sample_psi: rejection path needs a positive tilt to bound the weight");
  const double half_d = 0.5 * params.d;
  auto [lo, hi] = support(params.h);
  const double peak = std::min(std::max(params.d / params.s, lo), hi);
  const double log_peak_weight = half_d * std::log(peak) - 0.5 * params.s * peak;
  for (long attempt = 0; attempt < 1000000L; ++attempt) {
    const double u = sample_h(params.h, rng);
    const double log_w = half_d * std::log(u) - 0.5 * params.s * u - log_peak_weight;
    if (std::log(draw_uniform(rng)) <= log_w) return u;
  }
  throw std::runtime_error("sample_psi: rejection loop failed to terminate");
}

template <class Rng>
double sample_psi(const PsiParams& params, Rng& rng) {
  if (params.d < 1) throw std::invalid_argument("sample_psi: d must be >= 1");
  if (!(params.s >= 0.0) || !std::isfinite(params.s))
    throw std::invalid_argument("sample_psi: tilt must be finite and nonnegative");
  const double half_d = 0.5 * params.d;
  if (const auto* g = std::get_if<GammaMix>(&params.h.family))
    return draw_gamma(rng, g->shape + half_d, g->rate + 0.5 * params.s);
  if (const auto* ig = std::get_if<InvGammaMix>(&params.h.family))
    return draw_gig(rng, half_d - ig->shape, params.s, 2.0 * ig->rate);
  if (const auto* gg = std::get_if<GigMix>(&params.h.family))
    return draw_gig(rng, gg->order + half_d, gg->a + params.s, gg->b);
  return sample_psi_rejection(params, rng);
}

namespace detail {

inline void check_ratio_preconditions(const MixingDensity& h, int d, double s) {
  if (d < 1) throw std::invalid_argument("key_ratio: d must be >= 1");
  if (!(s >= 0.0)) throw std::invalid_argument("key_ratio: tilt must be nonnegative");
  const OriginClass oc = origin_class(h);
  if (oc.kind == OriginClass::Kind::Polynomial && !(2.0 * oc.value + d > 0.0))
    throw RatioInfiniteError(
        "key_ratio: numerator integral diverges at the origin; the ratio is infinite");
  if (s == 0.0 && !condition_m_holds(h, d))
    throw std::domain_error(
        "key_ratio: the d/2 moment of the mixing density must be finite at s = 0");
}

}  // namespace detail

// Quadrature evaluation of
//   int u^{(d-2)/2} e^{-su/2} h(u) du / int u^{d/2} e^{-su/2} h(u) du.
inline double key_ratio_numeric(const MixingDensity& h, int d, double s) {
  detail::check_ratio_preconditions(h, d, s);
  const double log_num = detail::log_tilted_moment(h, 0.5 * (d - 2.0), s);
  const double log_den = detail::log_tilted_moment(h, 0.5 * d, s);
  return std::exp(log_num - log_den);
}

inline double key_ratio(const MixingDensity& h, int d, double s) {
  detail::check_ratio_preconditions(h, d, s);
  if (const auto* g = std::get_if<GammaMix>(&h.family))
    return (g->rate + 0.5 * s) / (g->shape + 0.5 * d - 1.0);
  return key_ratio_numeric(h, d, s);
}

// Smallest drift slope for the reduced density u^{(d-1)/2} h(u), from the
// origin class alone: vanishing or faster-than-polynomial behaviour gives 0,
// a polynomial power c gives 1/(2c' + 1) with c' = c + (d-1)/2, and powers
// at or below -1/2 admit no finite slope at all.
inline double lambda_h(const MixingDensity& h, int d) {
  if (d < 1) throw std::invalid_argument("lambda_h: d must be >= 1");
  const OriginClass oc = origin_class(h);
  if (oc.kind != OriginClass::Kind::Polynomial) return 0.0;
  const double c_reduced = oc.value + 0.5 * (d - 1.0);
  if (!(c_reduced > -0.5)) return kInf;
  return 1.0 / (2.0 * c_reduced + 1.0);
}

namespace detail {

inline std::string fmt_param(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace detail

inline std::string describe(const MixingDensity& h) {
  using detail::fmt_param;
  return std::visit(
      [](const auto& fam) -> std::string {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, GammaMix>) {
          return "gamma(alpha=" + fmt_param(fam.shape) + ", gamma=" + fmt_param(fam.rate) + ")";
        } else if constexpr (std::is_same_v<T, BetaMix>) {
          return "beta(alpha=" + fmt_param(fam.shape_a) + ", gamma=" + fmt_param(fam.shape_b) + ")";
        } else if constexpr (std::is_same_v<T, WeibullMix>) {
          return "weibull(alpha=" + fmt_param(fam.shape) + ", gamma=" + fmt_param(fam.rate) + ")";
        } else if constexpr (std::is_same_v<T, FisherFMix>) {
          return "f(nu1=" + fmt_param(fam.df1) + ", nu2=" + fmt_param(fam.df2) + ")";
        } else if constexpr (std::is_same_v<T, ShiftedParetoMix>) {
          return "pareto(alpha=" + fmt_param(fam.scale) + ", gamma=" + fmt_param(fam.tail) + ")";
        } else if constexpr (std::is_same_v<T, InvGammaMix>) {
          return "ig(alpha=" + fmt_param(fam.shape) + ", gamma=" + fmt_param(fam.rate) + ")";
        } else if constexpr (std::is_same_v<T, GigMix>) {
          return "gig(v=" + fmt_param(fam.order) + ", a=" + fmt_param(fam.a) + ", b=" + fmt_param(fam.b) + ")";
        } else if constexpr (std::is_same_v<T, LogNormalMix>) {
          return "lognormal(mu=" + fmt_param(fam.log_mean) + ", gamma=" + fmt_param(fam.log_var) + ")";
        } else if constexpr (std::is_same_v<T, FrechetMix>) {
          return "frechet(alpha=" + fmt_param(fam.shape) + ", gamma=" + fmt_param(fam.scale) + ")";
        } else if constexpr (std::is_same_v<T, MixtureMix>) {
          std::string out = "mixture(";
          for (std::size_t i = 0; i < fam.parts.size(); ++i) {
            if (i) out += " + ";
            out += fmt_param(fam.weights[i]) + "*" + describe(fam.parts[i]);
          }
          return out + ")";
        } else {  // TruncatedMix
          return "truncated(" + describe(*fam.inner) + ", delta=" + fmt_param(fam.floor) + ")";
        }
      },
      h.family);
}

}  // namespace scalemix
