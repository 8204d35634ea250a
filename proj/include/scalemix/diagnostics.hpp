#pragma once

// Output-analysis helpers: batch-means standard errors, autocorrelation,
// and effective sample size with the initial-positive-sequence truncation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace scalemix {

struct BatchMeansResult {
  double mean = 0.0;
  double se = 0.0;
  std::size_t batch_count = 0;
};

inline BatchMeansResult batch_means_se(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 16) throw std::invalid_argument("batch_means_se: need at least 16 points");
  const std::size_t b = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  const std::size_t nb = n / b;
  BatchMeansResult out;
  out.batch_count = nb;
  double total = 0.0;
  for (double v : series) total += v;
  out.mean = total / static_cast<double>(n);

  std::vector<double> bm(nb, 0.0);
  for (std::size_t k = 0; k < nb; ++k) {
    double acc = 0.0;
    for (std::size_t i = k * b; i < (k + 1) * b; ++i) acc += series[i];
    bm[k] = acc / static_cast<double>(b);
  }
  double grand = 0.0;
  for (double v : bm) grand += v;
  grand /= static_cast<double>(nb);
  double ss = 0.0;
  for (double v : bm) ss += (v - grand) * (v - grand);
  out.se = std::sqrt(ss / (nb - 1.0) / static_cast<double>(nb));
  return out;
}

namespace detail {

inline std::pair<double, double> mean_and_css(const std::vector<double>& series) {
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(series.size());
  double css = 0.0;
  for (double v : series) css += (v - mean) * (v - mean);
  return {mean, css};
}

inline double acf_at(const std::vector<double>& series, double mean, double css,
                     std::size_t lag) {
  double acc = 0.0;
  for (std::size_t t = 0; t + lag < series.size(); ++t)
    acc += (series[t] - mean) * (series[t + lag] - mean);
  return acc / css;
}

}  // namespace detail

// Biased (1/N-normalised) sample autocorrelations for lags 0..max_lag.
inline std::vector<double> autocorrelation(const std::vector<double>& series,
                                           std::size_t max_lag) {
  if (series.size() < 4) throw std::invalid_argument("autocorrelation: series too short");
  if (max_lag >= series.size())
    throw std::invalid_argument("autocorrelation: max_lag must be below the length");
  const auto [mean, css] = detail::mean_and_css(series);
  if (!(css > 0.0))
    throw std::invalid_argument("autocorrelation: series has zero variance");
  std::vector<double> rho(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) rho[k] = detail::acf_at(series, mean, css, k);
  return rho;
}

// N / (1 + 2 sum rho_k), summing autocorrelations over the initial sequence
// of positive consecutive-lag pairs.
inline double effective_sample_size(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 16) throw std::invalid_argument("effective_sample_size: series too short");
  const auto [mean, css] = detail::mean_and_css(series);
  if (!(css > 0.0))
    throw std::invalid_argument("effective_sample_size: series has zero variance");
  const std::size_t max_lag = n / 4;
  double pair_sum = 0.0;
  for (std::size_t k = 0; k + 1 <= max_lag; k += 2) {
    const double pair = detail::acf_at(series, mean, css, k) +
                        detail::acf_at(series, mean, css, k + 1);
    if (pair <= 0.0) break;
    pair_sum += pair;
  }
  const double tau = std::max(1.0, 2.0 * pair_sum - 1.0);
  return static_cast<double>(n) / tau;
}

}  // namespace scalemix
