#pragma once

// Mechanized ergodicity certification for the two-block Gibbs samplers.
//
// A certificate reports whether the mixing density's behaviour near the
// origin, combined with the d/2-order moment condition, guarantees a
// geometrically ergodic chain and a proper posterior, together with the
// drift constants (lambda, L) of the affine envelope on the key ratio.

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "scalemix/format.hpp"
#include "scalemix/mixing.hpp"
#include "scalemix/pxda.hpp"

namespace scalemix {

enum class Verdict { Geometric, GeometricAndProper, Inconclusive };

enum class ReasonCode {
  None,                    // certified
  MomentConditionFails,    // d/2-order moment of h could not be verified finite
  OriginPowerTooSmall,     // polynomial origin power at or below the threshold
  MixtureOutOfScope,       // a mixture component is polynomial near the origin
  RescaleDensityUnverified // group-rescale density integrability unverified
};

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Geometric: return "Geometric";
    case Verdict::GeometricAndProper: return "GeometricAndProper";
    default: return "Inconclusive";
  }
}

inline std::string to_string(ReasonCode r) {
  switch (r) {
    case ReasonCode::None: return "none";
    case ReasonCode::MomentConditionFails: return "moment_condition_fails";
    case ReasonCode::OriginPowerTooSmall: return "origin_power_too_small";
    case ReasonCode::MixtureOutOfScope: return "mixture_out_of_scope";
    default: return "rescale_density_unverified";
  }
}

struct Certificate {
  Verdict verdict = Verdict::Inconclusive;
  OriginClass origin;
  bool condition_m = false;
  double polynomial_threshold = 0.0;  // (n - p + 2a - d - 1) / 2
  double lambda = std::numeric_limits<double>::infinity();
  double lambda_prime = std::numeric_limits<double>::infinity();
  double L_fit = std::numeric_limits<double>::quiet_NaN();
  ReasonCode reason = ReasonCode::None;
  std::string notes;
  int n = 0;
  int p = 0;
  int d = 0;
  double a = 0.0;

  bool certified() const { return verdict != Verdict::Inconclusive; }
  // Drift intercept for the full chain: L' = (n - p + 2a - 1) * n * L.
  double L_prime() const {
    return (n - p + 2.0 * a - 1.0) * static_cast<double>(n) * L_fit;
  }
};

namespace detail {

inline void check_certify_args(int n, int p, int d, double a) {
  if (d < 1) throw std::invalid_argument("certify: d must be >= 1");
  if (p < 1) throw std::invalid_argument("certify: p must be >= 1");
  if (n < 1) throw std::invalid_argument("certify: n must be >= 1");
  if (!(a > 0.0)) throw std::invalid_argument("certify: a must be positive");
}

inline std::string origin_note(const OriginClass& origin) {
  char buf[128];
  switch (origin.kind) {
    case OriginClass::Kind::ZeroNearOrigin:
      std::snprintf(buf, sizeof(buf), "origin: zero on (0, %g)", origin.value);
      break;
    case OriginClass::Kind::Polynomial:
      std::snprintf(buf, sizeof(buf), "origin: polynomial with power c=%g",
                    origin.value);
      break;
    default:
      std::snprintf(buf, sizeof(buf), "origin: faster than polynomial");
      break;
  }
  return buf;
}

// Intercept of the affine envelope on the key ratio, when a closed form is
// available: gamma families have an exactly affine ratio; zero-near-origin
// densities satisfy ratio <= 1/delta with zero slope.
inline double analytic_intercept(const MixingDensity& h, int d) {
  if (const auto* g = std::get_if<GammaMix>(&h.family)) {
    const double denom = 2.0 * g->shape + d - 2.0;
    if (denom > 0.0) return 2.0 * g->rate / denom;
    return std::numeric_limits<double>::infinity();
  }
  const OriginClass origin = origin_class(h);
  if (origin.kind == OriginClass::Kind::ZeroNearOrigin) return 1.0 / origin.value;
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

// Certifies the plain two-block sampler: the posterior is proper and the
// chain geometrically ergodic whenever the d/2-order moment of h is finite
// and h is zero near the origin, faster than polynomial, or polynomial with
// power c strictly above (n - p + 2a - d - 1)/2.  The conditions are
// sufficient only, so the negative verdict is always "Inconclusive".
inline Certificate certify(const MixingDensity& h, int n, int p, int d, double a) {
  detail::check_certify_args(n, p, d, a);
  Certificate cert;
  cert.n = n;
  cert.p = p;
  cert.d = d;
  cert.a = a;
  cert.origin = origin_class(h);
  cert.condition_m = condition_m_holds(h, d);
  cert.polynomial_threshold = 0.5 * (n - p + 2.0 * a - d - 1.0);
  cert.lambda = lambda_h(h, d);
  cert.lambda_prime = cert.lambda * (n - p + 2.0 * a - 1.0);
  cert.L_fit = detail::analytic_intercept(h, d);

  std::string notes = detail::origin_note(cert.origin);

  const bool mixture = std::holds_alternative<MixtureMix>(h.family);
  bool origin_ok = false;
  if (mixture) {
    // Mixtures are certified only when every component is zero near the
    // origin or faster than polynomial; a polynomial component (of any
    // power) falls outside the mixture rule.
    origin_ok = true;
    for (const auto& part : std::get<MixtureMix>(h.family).parts) {
      const OriginClass part_origin = origin_class(part);
      if (part_origin.kind == OriginClass::Kind::Polynomial) {
        origin_ok = false;
        cert.reason = ReasonCode::MixtureOutOfScope;
        notes += "; a mixture component is polynomial near the origin";
        break;
      }
    }
  } else {
    switch (cert.origin.kind) {
      case OriginClass::Kind::ZeroNearOrigin:
      case OriginClass::Kind::FasterThanPolynomial:
        origin_ok = true;
        break;
      case OriginClass::Kind::Polynomial:
        origin_ok = cert.origin.value > cert.polynomial_threshold;
        if (!origin_ok) {
          cert.reason = ReasonCode::OriginPowerTooSmall;
          notes += "; power does not exceed the threshold " +
                   format_double(cert.polynomial_threshold);
        }
        break;
    }
  }
  if (origin_ok && !cert.condition_m) {
    cert.reason = ReasonCode::MomentConditionFails;
    notes += "; the d/2-order moment of the mixing density is not verified finite";
  }

  if (origin_ok && cert.condition_m) {
    cert.verdict = Verdict::GeometricAndProper;
    cert.reason = ReasonCode::None;
  } else {
    cert.verdict = Verdict::Inconclusive;
  }
  cert.notes = notes;
  return cert;
}

// Certifies the group-rescaled sampler: needs the plain certificate plus a
// verified integrable rescale density.  Propriety is inherited from the
// plain result, so the positive verdict is "Geometric".
inline Certificate certify_pxda(const MixingDensity& h, int n, int p, int d,
                                double a) {
  Certificate cert = certify(h, n, p, d, a);
  const HCheck check = condition_h_check(h, n, d, a);
  if (cert.verdict == Verdict::GeometricAndProper) {
    if (check == HCheck::Unknown) {
      cert.verdict = Verdict::Inconclusive;
      cert.reason = ReasonCode::RescaleDensityUnverified;
      cert.notes += "; rescale density integrability could not be verified";
    } else {
      cert.verdict = Verdict::Geometric;
      cert.notes += (check == HCheck::Holds)
                        ? "; rescale density integrable (exponent zero)"
                        : "; rescale density integrable (moment check)";
    }
  }
  return cert;
}

// Convenience wrapper building the mixture in place.
inline Certificate certify_mixture(const std::vector<MixingDensity>& components,
                                   const std::vector<double>& weights, int n,
                                   int p, int d, double a) {
  return certify(MixingDensity::mixture(weights, components), n, p, d, a);
}

// ---------------------------------------------------------------------------
// Empirical affine fit of the key ratio, used to cross-check the theory.

struct DriftFit {
  double lambda_hat = 0.0;   // least-squares slope
  double L_hat = 0.0;        // least-squares intercept
  double max_violation = 0.0;  // largest positive excess of ratio over the fit
};

inline std::vector<double> default_s_grid() {
  std::vector<double> grid;
  grid.push_back(0.0);
  const double lo = std::log(1e-3);
  const double hi = std::log(1e3);
  for (int i = 0; i < 64; ++i)
    grid.push_back(std::exp(lo + (hi - lo) * i / 63.0));
  return grid;
}

inline DriftFit empirical_drift_fit(const MixingDensity& h, int d,
                                    const std::vector<double>& s_grid) {
  if (s_grid.size() < 2)
    throw std::invalid_argument("empirical_drift_fit: need at least two grid points");
  const std::size_t m = s_grid.size();
  std::vector<double> ratio(m);
  for (std::size_t i = 0; i < m; ++i) ratio[i] = key_ratio(h, d, s_grid[i]);

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += s_grid[i];
    sy += ratio[i];
    sxx += s_grid[i] * s_grid[i];
    sxy += s_grid[i] * ratio[i];
  }
  const double denom = m * sxx - sx * sx;
  if (!(std::fabs(denom) > 0.0))
    throw std::invalid_argument("empirical_drift_fit: degenerate grid");
  DriftFit fit;
  fit.lambda_hat = (m * sxy - sx * sy) / denom;
  fit.L_hat = (sy - fit.lambda_hat * sx) / m;
  fit.max_violation = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double excess = ratio[i] - (fit.lambda_hat * s_grid[i] + fit.L_hat);
    if (excess > fit.max_violation) fit.max_violation = excess;
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Serialization: machine-readable key=value block and human-readable report.

inline std::string certificate_kv(const Certificate& cert) {
  std::string origin_kind;
  switch (cert.origin.kind) {
    case OriginClass::Kind::ZeroNearOrigin: origin_kind = "zero"; break;
    case OriginClass::Kind::Polynomial: origin_kind = "polynomial"; break;
    default: origin_kind = "faster"; break;
  }
  std::string notes = cert.notes;
  for (char& ch : notes)
    if (ch == '\n' || ch == '\r') ch = ' ';
  std::ostringstream out;
  out << "verdict=" << to_string(cert.verdict) << '\n'
      << "origin=" << origin_kind << '\n'
      << "origin_value=" << format_double(cert.origin.value) << '\n'
      << "condition_m=" << (cert.condition_m ? "true" : "false") << '\n'
      << "n=" << cert.n << '\n'
      << "p=" << cert.p << '\n'
      << "d=" << cert.d << '\n'
      << "a=" << format_double(cert.a) << '\n'
      << "polynomial_threshold=" << format_double(cert.polynomial_threshold) << '\n'
      << "lambda=" << format_double(cert.lambda) << '\n'
      << "lambda_prime=" << format_double(cert.lambda_prime) << '\n'
      << "L_fit=" << format_double(cert.L_fit) << '\n'
      << "reason=" << to_string(cert.reason) << '\n'
      << "notes=" << notes << '\n';
  return out.str();
}

inline Certificate parse_certificate_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("certificate: malformed line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const auto need = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end())
      throw std::invalid_argument("certificate: missing key '" + key + "'");
    return it->second;
  };

  Certificate cert;
  const std::string verdict = need("verdict");
  if (verdict == "Geometric") cert.verdict = Verdict::Geometric;
  else if (verdict == "GeometricAndProper") cert.verdict = Verdict::GeometricAndProper;
  else if (verdict == "Inconclusive") cert.verdict = Verdict::Inconclusive;
  else throw std::invalid_argument("certificate: unknown verdict '" + verdict + "'");

  const std::string origin = need("origin");
  const double origin_value = parse_double(need("origin_value"));
  if (origin == "zero") cert.origin = OriginClass::zero_near_origin(origin_value);
  else if (origin == "polynomial") cert.origin = OriginClass::polynomial(origin_value);
  else if (origin == "faster") cert.origin = OriginClass::faster_than_polynomial();
  else throw std::invalid_argument("certificate: unknown origin '" + origin + "'");

  cert.condition_m = need("condition_m") == "true";
  cert.n = std::stoi(need("n"));
  cert.p = std::stoi(need("p"));
  cert.d = std::stoi(need("d"));
  cert.a = parse_double(need("a"));
  cert.polynomial_threshold = parse_double(need("polynomial_threshold"));
  cert.lambda = parse_double(need("lambda"));
  cert.lambda_prime = parse_double(need("lambda_prime"));
  cert.L_fit = parse_double(need("L_fit"));

  const std::string reason = need("reason");
  if (reason == "none") cert.reason = ReasonCode::None;
  else if (reason == "moment_condition_fails") cert.reason = ReasonCode::MomentConditionFails;
  else if (reason == "origin_power_too_small") cert.reason = ReasonCode::OriginPowerTooSmall;
  else if (reason == "mixture_out_of_scope") cert.reason = ReasonCode::MixtureOutOfScope;
  else if (reason == "rescale_density_unverified")
    cert.reason = ReasonCode::RescaleDensityUnverified;
  else throw std::invalid_argument("certificate: unknown reason '" + reason + "'");

  cert.notes = need("notes");
  return cert;
}

inline bool same_value(double x, double y) {
  if (std::isnan(x) && std::isnan(y)) return true;
  return x == y;
}

inline bool operator==(const Certificate& lhs, const Certificate& rhs) {
  return lhs.verdict == rhs.verdict && lhs.origin.kind == rhs.origin.kind &&
         same_value(lhs.origin.value, rhs.origin.value) &&
         lhs.condition_m == rhs.condition_m && lhs.n == rhs.n && lhs.p == rhs.p &&
         lhs.d == rhs.d && same_value(lhs.a, rhs.a) &&
         same_value(lhs.polynomial_threshold, rhs.polynomial_threshold) &&
         same_value(lhs.lambda, rhs.lambda) &&
         same_value(lhs.lambda_prime, rhs.lambda_prime) &&
         same_value(lhs.L_fit, rhs.L_fit) && lhs.reason == rhs.reason &&
         lhs.notes == rhs.notes;
}

inline std::string certificate_report(const Certificate& cert,
                                      const std::string& density_label) {
  std::ostringstream out;
  out << "ergodicity certificate\n"
      << "----------------------\n"
      << "mixing density : " << density_label << "\n"
      << "dimensions     : n=" << cert.n << " p=" << cert.p << " d=" << cert.d
      << " a=" << format_double(cert.a) << "\n"
      << "verdict        : " << to_string(cert.verdict) << "\n"
      << "moment check   : "
      << (cert.condition_m ? "d/2-order moment finite" : "not verified") << "\n"
      << "threshold      : " << format_double(cert.polynomial_threshold) << "\n"
      << "lambda         : " << format_double(cert.lambda) << "\n"
      << "lambda'        : " << format_double(cert.lambda_prime) << "\n"
      << "L              : " << format_double(cert.L_fit) << "\n";
  if (cert.certified() && std::isfinite(cert.L_prime()))
    out << "L'             : " << format_double(cert.L_prime()) << "\n";
  out << "reason         : " << to_string(cert.reason) << "\n"
      << "notes          : " << cert.notes << "\n";
  return out.str();
}

}  // namespace scalemix
