#pragma once

// Exact posterior sampling for the balanced special case n = p + d with the
// default prior exponent a = (d+1)/2, where the latent scales are a priori
// independent draws from h itself.  Used as ground truth when validating
// the Markov chain samplers, via moment z-scores.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "scalemix/chain.hpp"
#include "scalemix/da.hpp"
#include "scalemix/diagnostics.hpp"

namespace scalemix {

namespace detail {

inline void check_oracle_case(const RegressionData& data, const MixingDensity& h) {
  if (data.n() != data.p() + data.d())
    throw UnsupportedCaseError("exact_posterior_draw: requires n = p + d (got n = " +
                               std::to_string(data.n()) + ", p + d = " +
                               std::to_string(data.p() + data.d()) + ")");
  if (std::abs(data.a - 0.5 * (data.d() + 1.0)) > 1e-12)
    throw UnsupportedCaseError(
        "exact_posterior_draw: requires the default prior exponent a = (d+1)/2");
  if (!validate_design(data).n1_holds)
    throw UnsupportedCaseError(
        "exact_posterior_draw: augmented design (x : y) must have full column rank");
  if (!condition_m_holds(h, data.d()))
    throw UnsupportedCaseError(
        "exact_posterior_draw: mixing density lacks the finite d/2 moment: " + describe(h));
}

}  // namespace detail

template <class Rng>
ParameterState exact_posterior_draw(const RegressionData& data, const MixingDensity& h,
                                    Rng& rng) {
  detail::check_oracle_case(data, h);
  Eigen::VectorXd z(data.n());
  for (int i = 0; i < data.n(); ++i) z(i) = sample_h(h, rng);
  return draw_parameters_given_z(data, z, rng);
}

struct OracleDrawSet {
  std::vector<ParameterState> draws;
  std::uint64_t seed = 0;
};

inline OracleDrawSet exact_posterior_sample(const RegressionData& data,
                                            const MixingDensity& h, std::size_t count,
                                            std::uint64_t seed) {
  detail::check_oracle_case(data, h);
  OracleDrawSet out;
  out.seed = seed;
  out.draws.reserve(count);
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < count; ++k) out.draws.push_back(exact_posterior_draw(data, h, rng));
  return out;
}

struct MomentReport {
  struct Entry {
    std::string name;
    double z_mean = 0.0;
    double z_second = 0.0;
  };
  std::vector<Entry> entries;
  double max_abs_z = 0.0;
};

namespace detail {

inline std::pair<double, double> iid_mean_se(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace detail

// z-scores comparing first and second coordinate moments of a chain against
// an exact draw set; chain uncertainty uses batch means, oracle uncertainty
// the iid formula.
inline MomentReport compare_moments(const ChainOutput& chain, const OracleDrawSet& oracle) {
  if (chain.states.empty() || oracle.draws.empty())
    throw std::invalid_argument("compare_moments: empty inputs");
  const auto& s0 = chain.states.front();
  const auto& o0 = oracle.draws.front();
  if (s0.beta.rows() != o0.beta.rows() || s0.beta.cols() != o0.beta.cols())
    throw std::invalid_argument("compare_moments: dimension mismatch");

  const std::size_t ncoord = state_coordinates(s0).size();
  const auto names =
      coordinate_names(static_cast<int>(s0.beta.rows()), static_cast<int>(s0.beta.cols()));
  std::vector<std::vector<double>> cc(ncoord), oc_all(ncoord);
  for (auto& v : cc) v.reserve(chain.states.size());
  for (auto& v : oc_all) v.reserve(oracle.draws.size());
  for (const auto& st : chain.states) {
    const auto coords = state_coordinates(st);
    for (std::size_t c = 0; c < ncoord; ++c) cc[c].push_back(coords[c]);
  }
  for (const auto& dr : oracle.draws) {
    const auto coords = state_coordinates(dr);
    for (std::size_t c = 0; c < ncoord; ++c) oc_all[c].push_back(coords[c]);
  }
  MomentReport report;
  for (std::size_t c = 0; c < ncoord; ++c) {
    std::vector<double> xc2(cc[c].size()), oc2(oc_all[c].size());
    for (std::size_t k = 0; k < cc[c].size(); ++k) xc2[k] = cc[c][k] * cc[c][k];
    for (std::size_t k = 0; k < oc_all[c].size(); ++k) oc2[k] = oc_all[c][k] * oc_all[c][k];
    const BatchMeansResult b1 = batch_means_se(cc[c]);
    const BatchMeansResult b2 = batch_means_se(xc2);
    const auto [om1, ose1] = detail::iid_mean_se(oc_all[c]);
    const auto [om2, ose2] = detail::iid_mean_se(oc2);
    MomentReport::Entry e;
    e.name = names[c];
    e.z_mean = (b1.mean - om1) / std::sqrt(b1.se * b1.se + ose1 * ose1);
    e.z_second = (b2.mean - om2) / std::sqrt(b2.se * b2.se + ose2 * ose2);
    report.max_abs_z =
        std::max({report.max_abs_z, std::abs(e.z_mean), std::abs(e.z_second)});
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace scalemix
