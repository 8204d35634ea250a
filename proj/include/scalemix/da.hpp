#pragma once

// One sweep of the data-augmentation sampler: latent row scales given the
// current parameters, then (sigma, beta) given the scales.  The second half
// is shared verbatim with the parameter-expanded sampler and the exact
// sampler for the special balanced case.

#include <Eigen/Dense>
#include <utility>

#include "scalemix/mixing.hpp"
#include "scalemix/model.hpp"
#include "scalemix/mvdist.hpp"

namespace scalemix {

// Floor applied to the tilt of generic-rejection latent draws; an exact zero
// residual makes the acceptance weight unbounded there, while the families
// with closed-form tilted draws handle s = 0 exactly.
inline constexpr double kGenericTiltFloor = 1e-12;

template <class Rng>
Eigen::VectorXd draw_latent_scales(const ParameterState& state, const RegressionData& data,
                                   const MixingDensity& h, Rng& rng) {
  const Eigen::VectorXd r = residual_quadratics(state, data);
  const bool closed = psi_closed_form(h);
  Eigen::VectorXd z(data.n());
  for (int i = 0; i < data.n(); ++i) {
    PsiParams params{closed ? r(i) : std::max(r(i), kGenericTiltFloor), data.d(), h};
    z(i) = sample_psi(params, rng);
  }
  return z;
}

template <class Rng>
ParameterState draw_parameters_given_z(const RegressionData& data, const Eigen::VectorXd& z,
                                       Rng& rng) {
  const WeightedStats ws = weighted_stats(z, data);
  const int d = data.d();
  auto scatter_llt = detail::checked_llt(ws.scatter, "draw_parameters_given_z(scatter)");
  InverseWishartParams iw;
  iw.dof = data.n() - data.p() + 2.0 * data.a - d - 1.0;
  iw.theta = scatter_llt.solve(Eigen::MatrixXd::Identity(d, d));
  iw.theta = 0.5 * (iw.theta + iw.theta.transpose());
  ParameterState out;
  out.sigma = sample_inverse_wishart(iw, rng);
  out.beta = sample_matrix_normal({ws.mu, ws.omega, out.sigma}, rng);
  return out;
}

template <class Rng>
std::pair<ParameterState, Eigen::VectorXd> da_step(const ParameterState& state,
                                                   const RegressionData& data,
                                                   const MixingDensity& h, Rng& rng) {
  Eigen::VectorXd z = draw_latent_scales(state, data, h, rng);
  ParameterState next = draw_parameters_given_z(data, z, rng);
  return {std::move(next), std::move(z)};
}

// Least-squares start: coefficients at unit weights, residual covariance
// with a small ridge so degenerate fits still define a valid state.
inline ParameterState default_initial_state(const RegressionData& data) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(data.n());
  const WeightedStats ws = weighted_stats(ones, data);
  ParameterState state;
  state.beta = ws.mu;
  const Eigen::MatrixXd resid = data.y - data.x * ws.mu;
  state.sigma = resid.transpose() * resid / data.n() +
                1e-8 * Eigen::MatrixXd::Identity(data.d(), data.d());
  state.sigma = 0.5 * (state.sigma + state.sigma.transpose());
  return state;
}

}  // namespace scalemix
