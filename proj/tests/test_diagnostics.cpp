// Output-analysis helpers: batch-means standard errors, autocorrelation,
// and effective sample size with initial-positive-sequence truncation.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <scalemix/diagnostics.hpp>

#include "support/test_helpers.hpp"

using namespace scalemix;
using namespace testsupport;

TEST_CASE("batch means reproduce the iid standard error") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd(2.0, 3.0);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = nd(rng);

  const BatchMeansResult r = batch_means_se(xs);
  CHECK(r.batch_count == 100);
  CHECK(r.mean == Catch::Approx(mean_of(xs)));
  const double iid_se = std::sqrt(variance_of(xs) / xs.size());
  CHECK(r.se == Catch::Approx(iid_se).margin(0.3 * iid_se));
}

TEST_CASE("batch means track the autocorrelation-inflated error of AR(1)") {
  // Stationary AR(1) with phi = 0.9 and unit marginal variance has
  // Var(mean) ~ (1+phi)/(1-phi) / N = 19/N, so se * sqrt(N) ~ sqrt(19).
  std::mt19937_64 rng(77);
  const auto xs = ar1_series(200000, 0.9, rng);
  const BatchMeansResult r = batch_means_se(xs);
  const double target = std::sqrt(19.0);
  CHECK(r.se * std::sqrt(static_cast<double>(xs.size())) ==
        Catch::Approx(target).margin(0.2 * target));
}

TEST_CASE("batch means edge cases and input validation") {
  std::vector<double> constant(20, 3.0);
  const BatchMeansResult r = batch_means_se(constant);
  CHECK(r.mean == 3.0);
  CHECK(r.se == 0.0);
  CHECK(r.batch_count == 5);

  std::vector<double> short_series(15, 1.0);
  CHECK_THROWS_AS(batch_means_se(short_series), std::invalid_argument);
}

TEST_CASE("batch-means error scales linearly with the data") {
  std::mt19937_64 rng(44);
  const auto xs = ar1_series(5000, 0.5, rng);
  std::vector<double> scaled(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) scaled[i] = -7.0 * xs[i] + 2.0;
  const BatchMeansResult a = batch_means_se(xs);
  const BatchMeansResult b = batch_means_se(scaled);
  CHECK(b.se == Catch::Approx(7.0 * a.se).epsilon(1e-12));
  CHECK(b.mean == Catch::Approx(-7.0 * a.mean + 2.0).epsilon(1e-12));
}

TEST_CASE("autocorrelation values on a short deterministic series") {
  // For {1,2,3,4}: css = 5, lag-1 sum = 1.25, lag-2 sum = -1.5,
  // lag-3 sum = -0.45 * 5.
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const auto rho = autocorrelation(xs, 3);
  REQUIRE(rho.size() == 4);
  CHECK(rho[0] == Catch::Approx(1.0));
  CHECK(rho[1] == Catch::Approx(0.25));
  CHECK(rho[2] == Catch::Approx(-0.3));
  CHECK(rho[3] == Catch::Approx(-0.45));
}

TEST_CASE("autocorrelation recovers the AR(1) decay") {
  std::mt19937_64 rng(1234);
  const auto xs = ar1_series(100000, 0.8, rng);
  const auto rho = autocorrelation(xs, 5);
  for (std::size_t k = 1; k <= 5; ++k)
    CHECK(rho[k] == Catch::Approx(std::pow(0.8, static_cast<double>(k))).margin(0.03));
}

TEST_CASE("autocorrelation input validation") {
  CHECK_THROWS_AS(autocorrelation({1.0, 2.0, 3.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(autocorrelation({1.0, 2.0, 3.0, 4.0, 5.0}, 5), std::invalid_argument);
  CHECK_THROWS_AS(autocorrelation(std::vector<double>(10, 2.5), 3), std::invalid_argument);
}

TEST_CASE("effective sample size of iid data is close to the length") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = nd(rng);
  const double ess = effective_sample_size(xs);
  CHECK(ess == Catch::Approx(static_cast<double>(xs.size())).margin(0.15 * xs.size()));
}

TEST_CASE("effective sample size of AR(1) matches N/19") {
  // Integrated autocorrelation time of AR(1): 1 + 2 sum phi^k
  // = (1+phi)/(1-phi) = 19 at phi = 0.9.
  std::mt19937_64 rng(55);
  const auto xs = ar1_series(200000, 0.9, rng);
  const double ess = effective_sample_size(xs);
  const double target = xs.size() / 19.0;
  CHECK(ess == Catch::Approx(target).margin(0.2 * target));
}

TEST_CASE("duplicating every draw halves the effective sample size") {
  std::mt19937_64 rng(66);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> xs(40000);
  for (std::size_t i = 0; i < xs.size(); i += 2) {
    const double v = nd(rng);
    xs[i] = v;
    xs[i + 1] = v;
  }
  const double ess = effective_sample_size(xs);
  const double target = xs.size() / 2.0;
  CHECK(ess == Catch::Approx(target).margin(0.15 * target));
}

TEST_CASE("effective sample size is invariant to affine maps") {
  std::mt19937_64 rng(88);
  const auto xs = ar1_series(5000, 0.6, rng);
  std::vector<double> mapped(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) mapped[i] = 4.0 * xs[i] - 11.0;
  CHECK(effective_sample_size(mapped) ==
        Catch::Approx(effective_sample_size(xs)).epsilon(1e-9));
}

TEST_CASE("effective sample size input validation") {
  CHECK_THROWS_AS(effective_sample_size(std::vector<double>(15, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(effective_sample_size(std::vector<double>(100, 0.5)),
                  std::invalid_argument);
}
