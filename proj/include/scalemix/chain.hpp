#pragma once

// Chain driver shared by the plain and parameter-expanded samplers.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "scalemix/da.hpp"
#include "scalemix/pxda.hpp"

namespace scalemix {

enum class Algorithm { Da, PxDa };

struct ChainConfig {
  RegressionData data;
  MixingDensity h;
  long iterations = 0;
  std::optional<long> burn_in;  // defaults to iterations / 10
  long thin = 1;
  std::uint64_t seed = 0;
  std::optional<ParameterState> init;  // defaults to the least-squares state
  bool record_latent = false;
};

struct ChainOutput {
  std::vector<ParameterState> states;
  std::vector<double> drift_trace;            // V at each recorded state
  std::vector<Eigen::VectorXd> latent_trace;  // only when record_latent
  Eigen::VectorXd latent_mean;                // post burn-in mean of z
  long iterations_run = 0;
  long burn_in = 0;
  long thin = 1;
  bool completed = false;
  std::string error;
};

inline long resolved_burn_in(const ChainConfig& config) {
  return config.burn_in.value_or(config.iterations / 10);
}

template <class Rng>
ChainOutput run_chain(const ChainConfig& config, Rng& rng, Algorithm algo = Algorithm::Da) {
  const RegressionData& data = config.data;
  const long burn = resolved_burn_in(config);
  if (config.iterations < 1)
    throw std::invalid_argument("run_chain: iterations must be positive");
  if (burn < 0 || burn >= config.iterations)
    throw std::invalid_argument("run_chain: burn_in must lie in [0, iterations)");
  if (config.thin < 1) throw std::invalid_argument("run_chain: thin must be >= 1");

  const ConditionReport rep = validate_design(data);
  if (!rep.n1_holds)
    throw std::invalid_argument(
        "run_chain: augmented design (x : y) is rank deficient; the posterior is improper");
  if (!rep.n2_holds)
    throw std::invalid_argument(
        "run_chain: need n > p + 2d - 2a for a proper conditional scale draw");
  if (!condition_m_holds(config.h, data.d()))
    throw UnsupportedCaseError(
        "run_chain: the mixing density lacks the finite d/2 moment required here: " +
        describe(config.h));
  if (algo == Algorithm::PxDa &&
      condition_h_check(config.h, data.n(), data.d(), data.a) == HCheck::Unknown)
    throw UnsupportedCaseError(
        "run_chain: cannot verify that the rescale density of the expanded sampler is "
        "integrable for " + describe(config.h) + "; use the plain sampler instead");

  ChainOutput out;
  out.burn_in = burn;
  out.thin = config.thin;
  const long recorded = (config.iterations - burn) / config.thin;
  out.states.reserve(recorded);
  out.drift_trace.reserve(recorded);
  out.latent_mean = Eigen::VectorXd::Zero(data.n());

  ParameterState state = config.init ? *config.init : default_initial_state(data);
  long kept = 0;
  try {
    for (long m = 1; m <= config.iterations; ++m) {
      auto [next, z] = algo == Algorithm::Da ? da_step(state, data, config.h, rng)
                                             : pxda_step(state, data, config.h, rng);
      state = std::move(next);
      ++out.iterations_run;
      if (m > burn) {
        out.latent_mean += z;
        ++kept;
        if ((m - burn) % config.thin == 0) {
          out.states.push_back(state);
          out.drift_trace.push_back(drift_value(state, data));
          if (config.record_latent) out.latent_trace.push_back(z);
        }
      }
    }
    out.completed = true;
  } catch (const std::exception& err) {
    out.completed = false;
    out.error = err.what();
  }
  if (kept > 0) out.latent_mean /= static_cast<double>(kept);
  return out;
}

inline ChainOutput run_chain_seeded(const ChainConfig& config, Algorithm algo = Algorithm::Da) {
  std::mt19937_64 rng(config.seed);
  return run_chain(config, rng, algo);
}

}  // namespace scalemix
