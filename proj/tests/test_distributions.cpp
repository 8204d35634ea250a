#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "scalemix/distributions.hpp"
#include "scalemix/mixing.hpp"
#include "support/test_helpers.hpp"

using namespace scalemix;
using namespace testsupport;

namespace {

std::vector<double> collect(std::size_t n, const std::function<double(std::mt19937_64&)>& draw,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = draw(rng);
  return out;
}

// inverse Gaussian CDF with mean mu and shape lam
double inverse_gaussian_cdf(double x, double mu, double lam) {
  if (x <= 0.0) return 0.0;
  const double r = std::sqrt(lam / x);
  return normal_cdf(r * (x / mu - 1.0)) +
         std::exp(2.0 * lam / mu) * normal_cdf(-r * (x / mu + 1.0));
}

}  // namespace

TEST_CASE("gamma draws have the documented rate parametrization") {
  const auto xs = collect(
      200000, [](std::mt19937_64& rng) { return draw_gamma(rng, 3.0, 2.0); }, 11);
  // Gamma(shape=3, rate=2): mean 1.5, variance 0.75
  CHECK_THAT(mean_of(xs), Catch::Matchers::WithinAbs(1.5, 0.02));
  CHECK_THAT(variance_of(xs), Catch::Matchers::WithinAbs(0.75, 0.04));
  const double d =
      one_sample_ks(xs, [](double x) { return gamma_cdf(x, 3.0, 2.0); });
  CHECK(d < ks_one_sample_critical_1pct(xs.size()));
}

TEST_CASE("uniform draws live in the half-open unit interval") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = draw_uniform(rng);
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
  }
}

TEST_CASE("generalized inverse Gaussian draws match the density on a grid") {
  struct Case {
    double order, a, b;
  };
  const Case cases[] = {{2.5, 1.0, 3.0},
                        {-1.2, 0.5, 2.0},
                        {0.5, 2.0, 0.01},
                        {0.0, 1.0, 1.0},
                        {3.0, 100.0, 100.0},
                        {-0.5, 1.0, 1.0}};
  for (const auto& c : cases) {
    CAPTURE(c.order, c.a, c.b);
    const auto xs = collect(
        20000,
        [&](std::mt19937_64& rng) { return draw_gig(rng, c.order, c.a, c.b); },
        17);
    const auto logpdf = [&](double u) {
      return (c.order - 1.0) * std::log(u) - 0.5 * (c.a * u + c.b / u);
    };
    const GridCdf cdf = grid_cdf_from_logpdf(logpdf, 0.0, kInf);
    const double d = one_sample_ks(xs, [&](double x) { return cdf(x); });
    CHECK(d < ks_one_sample_critical_1pct(xs.size()));
  }
}

TEST_CASE("order -1/2 reduces to the inverse Gaussian law") {
  const double mu = 1.3, lam = 2.0;
  // GIG(-1/2, lam/mu^2, lam) is inverse Gaussian(mu, lam)
  const auto xs = collect(
      20000,
      [&](std::mt19937_64& rng) { return draw_gig(rng, -0.5, lam / (mu * mu), lam); },
      23);
  const double d = one_sample_ks(
      xs, [&](double x) { return inverse_gaussian_cdf(x, mu, lam); });
  CHECK(d < ks_one_sample_critical_1pct(xs.size()));
}

TEST_CASE("boundary parameters fall back to gamma and inverse gamma") {
  const auto gam = collect(
      20000, [](std::mt19937_64& rng) { return draw_gig(rng, 2.0, 3.0, 0.0); }, 29);
  const double d1 =
      one_sample_ks(gam, [](double x) { return gamma_cdf(x, 2.0, 1.5); });
  CHECK(d1 < ks_one_sample_critical_1pct(gam.size()));

  auto inv = collect(
      20000, [](std::mt19937_64& rng) { return draw_gig(rng, -2.5, 0.0, 3.0); }, 31);
  for (auto& v : inv) v = 1.0 / v;
  const double d2 =
      one_sample_ks(inv, [](double x) { return gamma_cdf(x, 2.5, 1.5); });
  CHECK(d2 < ks_one_sample_critical_1pct(inv.size()));
}

TEST_CASE("degenerate parameter combinations are rejected") {
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(draw_gig(rng, -1.0, 1.0, 0.0), UnsupportedCaseError);
  CHECK_THROWS_AS(draw_gig(rng, 1.0, 0.0, 0.0), UnsupportedCaseError);
  CHECK_THROWS_AS(draw_gig(rng, 0.5, 0.0, 1.0), UnsupportedCaseError);
  CHECK_THROWS_AS(draw_gig(rng, 0.5, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(draw_gamma(rng, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(draw_gamma(rng, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("draws are reproducible under a fixed seed") {
  const auto a = collect(
      64, [](std::mt19937_64& rng) { return draw_gig(rng, 1.7, 2.0, 0.5); }, 99);
  const auto b = collect(
      64, [](std::mt19937_64& rng) { return draw_gig(rng, 1.7, 2.0, 0.5); }, 99);
  CHECK(a == b);
}

TEST_CASE("sampler agrees with the normalized density of the mixing family") {
  const MixingDensity h = MixingDensity::gig(-0.8, 1.5, 2.5);
  const auto xs = collect(
      20000, [&](std::mt19937_64& rng) { return draw_gig(rng, -0.8, 1.5, 2.5); },
      41);
  const GridCdf cdf =
      grid_cdf_from_logpdf([&](double u) { return log_density(h, u); }, 0.0, kInf);
  const double d = one_sample_ks(xs, [&](double x) { return cdf(x); });
  CHECK(d < ks_one_sample_critical_1pct(xs.size()));
}
