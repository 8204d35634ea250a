#pragma once

// Data/parameter containers for the multivariate linear model with
// heavy-tailed rows, plus the weighted sufficient statistics that drive the
// conditional draws.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scalemix/errors.hpp"

namespace scalemix {

struct RegressionData {
  Eigen::MatrixXd y;  // n x d responses
  Eigen::MatrixXd x;  // n x p covariates
  double a;           // prior exponent on |Sigma|^{-a}

  RegressionData(Eigen::MatrixXd y_in, Eigen::MatrixXd x_in, double a_in)
      : y(std::move(y_in)), x(std::move(x_in)), a(a_in) {
    if (y.rows() < 1 || y.cols() < 1 || x.rows() < 1 || x.cols() < 1)
      throw std::invalid_argument("RegressionData: empty design or response");
    if (y.rows() != x.rows())
      throw std::invalid_argument("RegressionData: y and x row counts differ");
    if (!y.allFinite() || !x.allFinite() || !std::isfinite(a))
      throw std::invalid_argument("RegressionData: non-finite entries");
    if (!(a > 0.0)) throw std::invalid_argument("RegressionData: a must be positive");
  }

  int n() const { return static_cast<int>(y.rows()); }
  int p() const { return static_cast<int>(x.cols()); }
  int d() const { return static_cast<int>(y.cols()); }
};

struct ParameterState {
  Eigen::MatrixXd beta;   // p x d
  Eigen::MatrixXd sigma;  // d x d, symmetric positive definite
};

struct ConditionReport {
  bool n1_holds = false;  // augmented design (x : y) has full column rank
  bool n2_holds = false;  // n > p + 2d - 2a
  int rank_lambda = 0;
};

struct WeightedStats {
  Eigen::VectorXd q_inv_diag;  // the row weights z_i
  Eigen::MatrixXd omega;       // (x' diag(z) x)^{-1}
  Eigen::MatrixXd mu;          // omega x' diag(z) y
  Eigen::MatrixXd scatter;     // y' diag(z) y - mu' omega^{-1} mu
};

namespace detail {

inline Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& m,
                                               const std::string& who) {
  if (m.rows() != m.cols()) throw NotSpdError(who + ": matrix is not square");
  const double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (scale + 1.0))
    throw NotSpdError(who + ": matrix is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NotSpdError(who + ": matrix is not positive definite");
  return llt;
}

}  // namespace detail

inline ConditionReport validate_design(const RegressionData& data) {
  const int n = data.n(), p = data.p(), d = data.d();
  Eigen::MatrixXd lambda(n, p + d);
  lambda << data.x, data.y;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(lambda);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  ConditionReport rep;
  rep.rank_lambda = rank;
  rep.n1_holds = rank == p + d;
  rep.n2_holds = static_cast<double>(n) > p + 2.0 * d - 2.0 * data.a;
  return rep;
}

// Row-wise Mahalanobis residuals r_i = (beta' x_i - y_i)' sigma^{-1} (beta' x_i - y_i).
inline Eigen::VectorXd residual_quadratics(const ParameterState& state,
                                           const RegressionData& data) {
  if (state.beta.rows() != data.p() || state.beta.cols() != data.d())
    throw std::invalid_argument("residual_quadratics: beta has wrong shape");
  if (state.sigma.rows() != data.d() || state.sigma.cols() != data.d())
    throw std::invalid_argument("residual_quadratics: sigma has wrong shape");
  auto llt = detail::checked_llt(state.sigma, "residual_quadratics");
  Eigen::MatrixXd resid = data.x * state.beta - data.y;                    // n x d
  Eigen::MatrixXd whitened = llt.matrixL().solve(resid.transpose());      // d x n
  return whitened.colwise().squaredNorm().transpose();
}

inline double drift_value(const ParameterState& state, const RegressionData& data) {
  return residual_quadratics(state, data).sum();
}

inline WeightedStats weighted_stats(const Eigen::VectorXd& z, const RegressionData& data) {
  const int n = data.n(), p = data.p(), d = data.d();
  if (z.size() != n) throw std::invalid_argument("weighted_stats: z has wrong length");
  for (int i = 0; i < n; ++i)
    if (!(z(i) > 0.0) || !std::isfinite(z(i)))
      throw DegenerateWeightsError("weighted_stats: weights must be positive and finite");

  const Eigen::VectorXd sqrt_z = z.cwiseSqrt();
  const Eigen::MatrixXd xw = sqrt_z.asDiagonal() * data.x;
  const Eigen::MatrixXd yw = sqrt_z.asDiagonal() * data.y;
  const Eigen::MatrixXd cross = xw.transpose() * xw;  // x' diag(z) x

  Eigen::LLT<Eigen::MatrixXd> llt(cross);
  if (llt.info() != Eigen::Success)
    throw DegenerateWeightsError("weighted_stats: weighted cross-product is singular");

  WeightedStats out;
  out.q_inv_diag = z;
  out.omega = llt.solve(Eigen::MatrixXd::Identity(p, p));
  out.mu = llt.solve(xw.transpose() * yw);
  const Eigen::MatrixXd resid = yw - xw * out.mu;  // sqrt(z)-scaled residuals
  Eigen::MatrixXd scatter = resid.transpose() * resid;
  out.scatter = 0.5 * (scatter + scatter.transpose());
  (void)d;
  return out;
}

// Flattened coordinates of a state: vec(beta) column by column, then the
// lower triangle of sigma column by column.
inline std::vector<double> state_coordinates(const ParameterState& s) {
  std::vector<double> out;
  for (int j = 0; j < s.beta.cols(); ++j)
    for (int i = 0; i < s.beta.rows(); ++i) out.push_back(s.beta(i, j));
  for (int j = 0; j < s.sigma.cols(); ++j)
    for (int i = j; i < s.sigma.rows(); ++i) out.push_back(s.sigma(i, j));
  return out;
}

inline std::vector<std::string> coordinate_names(int p, int d) {
  std::vector<std::string> out;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < p; ++i)
      out.push_back("beta_" + std::to_string(i) + "_" + std::to_string(j));
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i)
      out.push_back("sigma_" + std::to_string(i) + "_" + std::to_string(j));
  return out;
}

}  // namespace scalemix
