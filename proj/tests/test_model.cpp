#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>

#include "scalemix/model.hpp"

using namespace scalemix;

namespace {

RegressionData tiny_data(double a = 1.0) {
  Eigen::MatrixXd y(2, 1), x(2, 1);
  y << 1.0, 3.0;
  x << 1.0, 1.0;
  return RegressionData(y, x, a);
}

}  // namespace

TEST_CASE("container validation rejects malformed inputs") {
  Eigen::MatrixXd y(2, 1), x(2, 1), x3(3, 1);
  y << 1.0, 3.0;
  x << 1.0, 1.0;
  x3 << 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(RegressionData(y, x3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(RegressionData(y, x, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(RegressionData(y, x, -1.0), std::invalid_argument);
  Eigen::MatrixXd bad = y;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(RegressionData(bad, x, 1.0), std::invalid_argument);
  const RegressionData ok = tiny_data();
  CHECK(ok.n() == 2);
  CHECK(ok.p() == 1);
  CHECK(ok.d() == 1);
}

TEST_CASE("design validation checks rank and the sample-size inequality") {
  const RegressionData data = tiny_data(1.0);
  const ConditionReport rep = validate_design(data);
  CHECK(rep.n1_holds);
  CHECK(rep.rank_lambda == 2);
  CHECK(rep.n2_holds);  // 2 > 1 + 2 - 2

  // constant response collinear with the intercept column
  Eigen::MatrixXd y(2, 1), x(2, 1);
  y << 2.0, 2.0;
  x << 1.0, 1.0;
  const ConditionReport collinear = validate_design(RegressionData(y, x, 1.0));
  CHECK_FALSE(collinear.n1_holds);
  CHECK(collinear.rank_lambda == 1);

  // raising the sample-size requirement by shrinking a
  const ConditionReport small_a = validate_design(tiny_data(0.4));
  CHECK_FALSE(small_a.n2_holds);  // 2 > 1 + 2 - 0.8 fails
}

TEST_CASE("residual quadratics: worked scalar example") {
  const RegressionData data = tiny_data();
  ParameterState state;
  state.beta = Eigen::MatrixXd::Constant(1, 1, 2.0);
  state.sigma = Eigen::MatrixXd::Constant(1, 1, 4.0);
  const Eigen::VectorXd r = residual_quadratics(state, data);
  REQUIRE(r.size() == 2);
  // residuals (-1, 1), each squared over sigma = 4
  CHECK_THAT(r(0), Catch::Matchers::WithinAbs(0.25, 1e-14));
  CHECK_THAT(r(1), Catch::Matchers::WithinAbs(0.25, 1e-14));
  CHECK_THAT(drift_value(state, data), Catch::Matchers::WithinAbs(0.5, 1e-14));
}

TEST_CASE("residual quadratics are invariant under joint linear remaps") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  const int n = 6, p = 2, d = 3;
  Eigen::MatrixXd y(n, d), x(n, p), beta(p, d), m(d, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) y(i, j) = gauss(rng);
    for (int j = 0; j < p; ++j) x(i, j) = gauss(rng);
  }
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < d; ++j) beta(i, j) = gauss(rng);
  do {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = gauss(rng);
  } while (std::fabs(m.determinant()) < 0.1);

  Eigen::MatrixXd root(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) root(i, j) = gauss(rng);
  const Eigen::MatrixXd sigma =
      root * root.transpose() + Eigen::MatrixXd::Identity(d, d);

  const RegressionData data(y, x, 2.0);
  const RegressionData mapped(y * m, x, 2.0);
  const ParameterState s1{beta, sigma};
  const ParameterState s2{beta * m, m.transpose() * sigma * m};
  const Eigen::VectorXd r1 = residual_quadratics(s1, data);
  const Eigen::VectorXd r2 = residual_quadratics(s2, mapped);
  for (int i = 0; i < n; ++i)
    CHECK_THAT(r2(i), Catch::Matchers::WithinRel(r1(i), 1e-9));
}

TEST_CASE("residual quadratics reject a non-SPD scale") {
  const int d = 2;
  Eigen::MatrixXd y(3, d), x(3, 1);
  y.setRandom();
  x.setOnes();
  const RegressionData data(y, x, 1.5);
  ParameterState state;
  state.beta = Eigen::MatrixXd::Zero(1, d);
  state.sigma = Eigen::MatrixXd(d, d);
  state.sigma << 1.0, 2.0, 2.0, 1.0;  // indefinite
  CHECK_THROWS_AS(residual_quadratics(state, data), NotSpdError);
  state.sigma << 1.0, 0.5, 0.4, 1.0;  // asymmetric
  CHECK_THROWS_AS(residual_quadratics(state, data), NotSpdError);
  state.sigma = Eigen::MatrixXd::Zero(d, 3);  // wrong shape
  CHECK_THROWS_AS(residual_quadratics(state, data), std::invalid_argument);
}

TEST_CASE("weighted statistics: worked scalar examples") {
  const RegressionData data = tiny_data();

  Eigen::VectorXd unit = Eigen::VectorXd::Ones(2);
  const WeightedStats w1 = weighted_stats(unit, data);
  CHECK_THAT(w1.omega(0, 0), Catch::Matchers::WithinAbs(0.5, 1e-14));
  CHECK_THAT(w1.mu(0, 0), Catch::Matchers::WithinAbs(2.0, 1e-14));
  CHECK_THAT(w1.scatter(0, 0), Catch::Matchers::WithinAbs(2.0, 1e-13));

  Eigen::VectorXd skew(2);
  skew << 1.0, 3.0;
  const WeightedStats w2 = weighted_stats(skew, data);
  CHECK_THAT(w2.omega(0, 0), Catch::Matchers::WithinAbs(0.25, 1e-14));
  CHECK_THAT(w2.mu(0, 0), Catch::Matchers::WithinAbs(2.5, 1e-14));
  CHECK_THAT(w2.scatter(0, 0), Catch::Matchers::WithinAbs(3.0, 1e-13));
}

TEST_CASE("weighted statistics scale as expected in the weights") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  const int n = 8, p = 2, d = 2;
  Eigen::MatrixXd y(n, d), x(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) y(i, j) = gauss(rng);
    for (int j = 0; j < p; ++j) x(i, j) = gauss(rng);
  }
  const RegressionData data(y, x, 1.5);
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z(i) = 0.5 + i * 0.3;
  const double c = 2.75;

  const WeightedStats base = weighted_stats(z, data);
  const WeightedStats scaled = weighted_stats((c * z).eval(), data);
  CHECK((scaled.mu - base.mu).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((scaled.omega - base.omega / c).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((scaled.scatter - c * base.scatter).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("weighted statistics reject degenerate weights") {
  const RegressionData data = tiny_data();
  Eigen::VectorXd z(2);
  z << 1.0, 0.0;
  CHECK_THROWS_AS(weighted_stats(z, data), DegenerateWeightsError);
  z << 1.0, -2.0;
  CHECK_THROWS_AS(weighted_stats(z, data), DegenerateWeightsError);
  z << 1.0, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(weighted_stats(z, data), DegenerateWeightsError);
  Eigen::VectorXd wrong(3);
  wrong.setOnes();
  CHECK_THROWS_AS(weighted_stats(wrong, data), std::invalid_argument);
}

TEST_CASE("state flattening orders coordinates column by column") {
  ParameterState s;
  s.beta = Eigen::MatrixXd(2, 2);
  s.beta << 1.0, 3.0, 2.0, 4.0;
  s.sigma = Eigen::MatrixXd(2, 2);
  s.sigma << 5.0, 6.0, 6.0, 7.0;
  const auto coords = state_coordinates(s);
  const std::vector<double> expected{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0};
  CHECK(coords == expected);
  const auto names = coordinate_names(2, 2);
  const std::vector<std::string> expected_names{
      "beta_0_0", "beta_1_0", "beta_0_1", "beta_1_1",
      "sigma_0_0", "sigma_1_0", "sigma_1_1"};
  CHECK(names == expected_names);
}
