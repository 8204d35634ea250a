#pragma once

// Adaptive Gauss-Kronrod quadrature plus log-domain integration utilities.
// Integrals of densities on (0, inf) are done on the log axis t = log u,
// where power-law behaviour at the origin becomes exponential decay and a
// single scaled pass avoids overflow/underflow.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace scalemix {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
  std::size_t segments = 0;
};

namespace detail {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
inline constexpr double kGkNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kGkWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline std::pair<double, double> gauss_kronrod_15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = kGkWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kGkNodes[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    kron += kGkWeights[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  return {h * kron, std::abs(h * (kron - gauss))};
}

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

}  // namespace detail

template <class F>
IntegralResult integrate_adaptive(F f, double a, double b, double rel_tol = 1e-10,
                                  double abs_tol = 0.0, std::size_t max_segments = 4096) {
  if (!(a < b)) throw std::invalid_argument("integrate_adaptive: empty interval");
  std::priority_queue<detail::Segment> queue;
  auto [v0, e0] = detail::gauss_kronrod_15(f, a, b);
  queue.push({a, b, v0, e0});
  double total = v0, err = e0, stuck_err = 0.0;
  std::size_t n = 1;
  const double min_width = 1e-15 * (std::abs(a) + std::abs(b) + 1.0);
  while (n < max_segments) {
    const double tol = std::max(abs_tol, rel_tol * std::abs(total));
    if (err + stuck_err <= tol) break;
    detail::Segment worst = queue.top();
    if (worst.error <= 0.0) break;
    queue.pop();
    if (worst.b - worst.a < min_width) {
      // cannot refine further; retire the segment so we do not spin
      stuck_err += worst.error;
      err -= worst.error;
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    auto [vl, el] = detail::gauss_kronrod_15(f, worst.a, mid);
    auto [vr, er] = detail::gauss_kronrod_15(f, mid, worst.b);
    total += vl + vr - worst.value;
    err += el + er - worst.error;
    queue.push({worst.a, mid, vl, el});
    queue.push({mid, worst.b, vr, er});
    ++n;
  }
  IntegralResult out;
  out.value = total;
  out.error = err + stuck_err;
  out.segments = n;
  out.converged = out.error <= std::max(abs_tol, rel_tol * std::abs(total)) + 1e-300;
  return out;
}

// Bracketing window [lo, hi] around the peak of a log-integrand g, chosen so
// that everything outside contributes less than exp(-drop) relative mass.
struct LogWindow {
  double lo = 0.0, hi = 0.0, peak = 0.0, gmax = -kInf;
  bool found = false;
};

template <class G>
LogWindow find_log_window(G& g, double t_lo, double t_hi, double drop = 46.0) {
  LogWindow w;
  // finite bounds are honoured as-is; infinite bounds start from a scan box
  // wide enough to cover every representable exp() argument
  double slo = std::isfinite(t_lo)
                   ? t_lo
                   : (std::isfinite(t_hi) ? std::min(-745.0, t_hi - 1490.0) : -745.0);
  double shi = std::isfinite(t_hi)
                   ? t_hi
                   : (std::isfinite(t_lo) ? std::max(745.0, t_lo + 1490.0) : 745.0);
  if (!(slo < shi)) return w;
  // keep scan points strictly inside open endpoints
  const double range = shi - slo;
  const double nudge = 1e-9 * range;
  if (slo == t_lo) slo += nudge;
  if (shi == t_hi) shi -= nudge;

  constexpr int kScan = 1201;
  double best_t = 0.0, best_v = -kInf;
  int best_i = -1;
  const double step = (shi - slo) / (kScan - 1);
  for (int i = 0; i < kScan; ++i) {
    const double t = slo + step * i;
    const double v = g(t);
    if (std::isfinite(v) && v > best_v) {
      best_v = v;
      best_t = t;
      best_i = i;
    }
  }
  if (best_i < 0) return w;

  // golden-section refinement of the peak within the bracketing cell
  double a = std::max(slo, best_t - step);
  double b = std::min(shi, best_t + step);
  constexpr double kGolden = 0.6180339887498949;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double g1 = g(x1), g2 = g(x2);
  for (int it = 0; it < 80 && b - a > 1e-12 * (1.0 + std::abs(a)); ++it) {
    if (g1 < g2) {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + kGolden * (b - a);
      g2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - kGolden * (b - a);
      g1 = g(x1);
    }
  }
  const double mid = 0.5 * (a + b);
  const double gmid = g(mid);
  if (std::isfinite(gmid) && gmid > best_v) {
    best_v = gmid;
    best_t = mid;
  }

  // expand outward until the integrand has dropped far below the peak
  const double cut = best_v - drop;
  auto expand = [&](double sign, double bound) {
    double t = best_t, inc = std::max(step, 0.25);
    for (int it = 0; it < 400; ++it) {
      if (sign < 0 ? t <= bound : t >= bound) return bound;
      double next = sign < 0 ? std::max(bound, t - inc) : std::min(bound, t + inc);
      t = next;
      const double v = g(t);
      if (!(v > cut)) return t;  // includes -inf and nan
      inc *= 1.7;
    }
    return t;
  };
  w.lo = expand(-1.0, t_lo);
  w.hi = expand(+1.0, t_hi);
  w.peak = best_t;
  w.gmax = best_v;
  w.found = std::isfinite(w.lo) && std::isfinite(w.hi) && w.lo < w.hi;
  return w;
}

// log of the integral of exp(g(t)) over [t_lo, t_hi]; either bound may be
// infinite.  Returns -inf when the integrand vanishes identically.
template <class G>
double log_integral_exp(G g, double t_lo, double t_hi, double rel_tol = 1e-12) {
  LogWindow w = find_log_window(g, t_lo, t_hi);
  if (w.gmax == -kInf) return -kInf;
  if (!w.found)
    throw std::runtime_error("log_integral_exp: no integrable window located");
  const double gmax = w.gmax;
  auto f = [&](double t) {
    const double v = g(t) - gmax;
    if (!(v > -746.0)) return 0.0;
    return std::exp(std::min(v, 700.0));
  };
  IntegralResult r = integrate_adaptive(f, w.lo, w.hi, rel_tol, 0.0, 6000);
  if (!(r.value > 0.0)) return -kInf;
  return gmax + std::log(r.value);
}

}  // namespace scalemix
