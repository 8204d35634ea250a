#pragma once

// Matrix normal and inverse Wishart draws/log-densities.  The inverse
// Wishart follows the parametrisation with density
//   |w|^{-(m+r+1)/2} exp(-tr(theta^{-1} w^{-1})/2) / normaliser,
// i.e. theta^{-1} plays the role of the usual scale matrix, so
// w^{-1} ~ Wishart(m, theta) and E[w] = theta^{-1}/(m-r-1) for m > r+1.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "scalemix/distributions.hpp"
#include "scalemix/model.hpp"
#include "scalemix/special.hpp"

namespace scalemix {

struct MatrixNormalParams {
  Eigen::MatrixXd mean;     // r x c
  Eigen::MatrixXd row_cov;  // r x r
  Eigen::MatrixXd col_cov;  // c x c
};

struct InverseWishartParams {
  double dof = 0.0;        // m > r - 1
  Eigen::MatrixXd theta;   // r x r, inverse of the usual scale
};

namespace detail {

// Lower-triangular Bartlett factor: sqrt of gamma variates on the diagonal
// (chi-square generalised to real dof), standard normals below.
template <class Rng>
Eigen::MatrixXd bartlett_lower(int r, double dof, Rng& rng) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(r, r);
  for (int i = 0; i < r; ++i) {
    a(i, i) = std::sqrt(draw_gamma(rng, 0.5 * (dof - i), 0.5));
    for (int j = 0; j < i; ++j) a(i, j) = draw_normal(rng);
  }
  return a;
}

}  // namespace detail

template <class Rng>
Eigen::MatrixXd sample_matrix_normal(const MatrixNormalParams& params, Rng& rng) {
  const int r = static_cast<int>(params.mean.rows());
  const int c = static_cast<int>(params.mean.cols());
  auto row_llt = detail::checked_llt(params.row_cov, "sample_matrix_normal(row_cov)");
  auto col_llt = detail::checked_llt(params.col_cov, "sample_matrix_normal(col_cov)");
  if (params.row_cov.rows() != r || params.col_cov.rows() != c)
    throw std::invalid_argument("sample_matrix_normal: covariance shapes do not match mean");
  Eigen::MatrixXd g(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) g(i, j) = draw_normal(rng);
  return params.mean + Eigen::MatrixXd(row_llt.matrixL()) * g *
                           Eigen::MatrixXd(col_llt.matrixL()).transpose();
}

inline double logpdf_matrix_normal(const MatrixNormalParams& params,
                                   const Eigen::MatrixXd& z) {
  const int r = static_cast<int>(params.mean.rows());
  const int c = static_cast<int>(params.mean.cols());
  if (z.rows() != r || z.cols() != c)
    throw std::invalid_argument("logpdf_matrix_normal: wrong shape");
  auto row_llt = detail::checked_llt(params.row_cov, "logpdf_matrix_normal(row_cov)");
  auto col_llt = detail::checked_llt(params.col_cov, "logpdf_matrix_normal(col_cov)");
  const double log_det_row =
      2.0 * Eigen::MatrixXd(row_llt.matrixL()).diagonal().array().log().sum();
  const double log_det_col =
      2.0 * Eigen::MatrixXd(col_llt.matrixL()).diagonal().array().log().sum();
  // tr{A^{-1}(z-m)B^{-1}(z-m)'} as a squared Frobenius norm of the whitened
  // residual; the intermediate copy keeps the triangular solve alias-free
  const Eigen::MatrixXd row_white = row_llt.matrixL().solve(z - params.mean);
  const Eigen::MatrixXd row_white_t = row_white.transpose();
  const Eigen::MatrixXd white = col_llt.matrixL().solve(row_white_t);
  return -0.5 * r * c * std::log(2.0 * std::numbers::pi) - 0.5 * c * log_det_row -
         0.5 * r * log_det_col - 0.5 * white.squaredNorm();
}

template <class Rng>
Eigen::MatrixXd sample_inverse_wishart(const InverseWishartParams& params, Rng& rng) {
  const int r = static_cast<int>(params.theta.rows());
  if (!(params.dof > r - 1))
    throw std::invalid_argument("sample_inverse_wishart: dof must exceed r - 1");
  auto llt = detail::checked_llt(params.theta, "sample_inverse_wishart");
  const Eigen::MatrixXd f =
      Eigen::MatrixXd(llt.matrixL()) * detail::bartlett_lower(r, params.dof, rng);
  // w = (f f')^{-1} through a triangular solve, symmetric by construction
  const Eigen::MatrixXd finv =
      f.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(r, r));
  Eigen::MatrixXd w = finv.transpose() * finv;
  return 0.5 * (w + w.transpose());
}

inline double logpdf_inverse_wishart(const InverseWishartParams& params,
                                     const Eigen::MatrixXd& w) {
  const int r = static_cast<int>(params.theta.rows());
  if (w.rows() != r || w.cols() != r)
    throw std::invalid_argument("logpdf_inverse_wishart: wrong shape");
  if (!(params.dof > r - 1))
    throw std::invalid_argument("logpdf_inverse_wishart: dof must exceed r - 1");
  auto theta_llt = detail::checked_llt(params.theta, "logpdf_inverse_wishart(theta)");
  Eigen::LLT<Eigen::MatrixXd> w_llt(w);
  if (w_llt.info() != Eigen::Success) return -kInf;
  const double m = params.dof;
  const double log_det_w =
      2.0 * Eigen::MatrixXd(w_llt.matrixL()).diagonal().array().log().sum();
  const double log_det_theta =
      2.0 * Eigen::MatrixXd(theta_llt.matrixL()).diagonal().array().log().sum();
  const Eigen::MatrixXd w_inv = w_llt.solve(Eigen::MatrixXd::Identity(r, r));
  const double trace_term = theta_llt.solve(w_inv).trace();
  return -0.5 * (m + r + 1.0) * log_det_w - 0.5 * trace_term -
         0.5 * m * r * std::numbers::ln2 - 0.5 * m * log_det_theta -
         log_mv_gamma(r, 0.5 * m);
}

}  // namespace scalemix
