#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "drpr/error.hpp"
#include "drpr/stochastic.hpp"

// Stochastic approximation with expanding truncations:
//
//   c_k     = z_k + gamma_k y_{k+1},   y_{k+1} = g(z_k) + noise
//   z_{k+1} = c_k          if ||c_k|| <= M_{sigma_k}
//           = z_reset      otherwise, and sigma_{k+1} = sigma_k + 1
//
// Convergence to the root of g needs, from the caller: a Lyapunov function
// decreasing along g away from the root with the reset point inside its
// sublevel set, a locally bounded measurable g, and noise whose weighted
// partial sums vanish on convergent subsequences. None of these can be
// checked at run time; they are the caller's contract. The engine checks
// only what it owns: gamma > 0 and ||z_reset|| < M_0.

namespace drpr {

template <typename Scalar>
using GainRule = std::function<Scalar(std::int64_t k)>;

template <typename Scalar>
using BoundRule = std::function<Scalar(std::int64_t sigma)>;

/// gamma_k = 1 / (k + 1)^rho, rho in (0, 1]: positive, decreasing to zero,
/// with divergent partial sums.
template <typename Scalar = double>
GainRule<Scalar> harmonic_gain(Scalar rho = Scalar(1)) {
  detail::require(rho > 0 && rho <= 1, ErrorCode::InvalidArgument,
                  "gain exponent must lie in (0, 1]");
  if (rho == Scalar(1)) {
    return [](std::int64_t k) { return Scalar(1) / Scalar(k + 1); };
  }
  return [rho](std::int64_t k) { return Scalar(1) / std::pow(Scalar(k + 1), rho); };
}

/// (gamma_k - gamma_{k+1}) / (gamma_k gamma_{k+1}); its limit is the sigma
/// of the rate condition. Identically 1 for gamma_k = 1/(k+1).
template <typename Scalar>
Scalar gain_rate_quantity(const GainRule<Scalar>& gains, std::int64_t k) {
  const Scalar now = gains(k);
  const Scalar next = gains(k + 1);
  return (now - next) / (now * next);
}

/// M_sigma = m0 * growth^sigma.
template <typename Scalar = double>
BoundRule<Scalar> geometric_bounds(Scalar m0 = Scalar(10), Scalar growth = Scalar(2)) {
  detail::require(m0 > 0 && growth > 1, ErrorCode::InvalidArgument,
                  "bounds need m0 > 0 and growth > 1");
  return [m0, growth](std::int64_t sigma) { return m0 * std::pow(growth, Scalar(sigma)); };
}

template <typename Scalar>
struct SaawetConfig {
  GainRule<Scalar> gains = harmonic_gain<Scalar>();
  BoundRule<Scalar> bounds = geometric_bounds<Scalar>();
  Vector<Scalar> reset_point;  // defaults to the origin when empty
  Vector<Scalar> initial;
  std::int64_t first_index = 0;  // index k of the first gain used
};

template <typename Scalar>
struct SaawetState {
  Vector<Scalar> z;
  std::int64_t sigma = 0;
  std::int64_t k = 0;
  std::int64_t steps = 0;
  std::int64_t last_truncation = -1;  // step count at the most recent reset
};

template <typename Scalar>
Vector<Scalar> reset_point_of(const SaawetConfig<Scalar>& config) {
  if (config.reset_point.size() != 0) return config.reset_point;
  return Vector<Scalar>::Zero(config.initial.size());
}

template <typename Scalar>
SaawetState<Scalar> saawet_initial_state(const SaawetConfig<Scalar>& config) {
  detail::require(config.initial.size() > 0, ErrorCode::InvalidArgument,
                  "initial iterate must be non-empty");
  const Vector<Scalar> reset = reset_point_of(config);
  detail::require(reset.size() == config.initial.size(), ErrorCode::DimensionMismatch,
                  "reset point and initial iterate differ in dimension");
  detail::require(reset.norm() < config.bounds(0), ErrorCode::InvalidArgument,
                  "reset point must lie strictly inside the first truncation bound");
  SaawetState<Scalar> state;
  state.z = config.initial;
  state.k = config.first_index;
  return state;
}

/// Applies one truncated update with observation `y` and gain `gamma`.
/// The candidate is accepted when its Euclidean norm is <= M_sigma.
template <typename Scalar, typename Derived>
void saawet_step(SaawetState<Scalar>& state, const Eigen::MatrixBase<Derived>& y, Scalar gamma,
                 const SaawetConfig<Scalar>& config) {
  detail::require(y.size() == state.z.size(), ErrorCode::DimensionMismatch,
                  "observation dimension differs from iterate");
  detail::require(gamma > 0, ErrorCode::InvalidArgument, "gain must be positive");
  Vector<Scalar> candidate = state.z + gamma * y;
  if (candidate.norm() <= config.bounds(state.sigma)) {
    state.z = std::move(candidate);
  } else {
    state.z = reset_point_of(config);
    ++state.sigma;
    state.last_truncation = state.steps + 1;
  }
  ++state.k;
  ++state.steps;
}

template <typename Scalar>
struct SaawetSample {
  std::int64_t step;  // number of updates applied
  Vector<Scalar> z;
  std::int64_t sigma;
};

/// Observation source: returns y_{k+1} = g(z_k) + noise for the current
/// iterate and gain index.
template <typename Scalar>
using ObservationSource = std::function<Vector<Scalar>(const Vector<Scalar>& z, std::int64_t k)>;

template <typename Scalar>
struct SaawetRun {
  SaawetState<Scalar> final_state;
  std::vector<SaawetSample<Scalar>> samples;
};

/// Runs `steps` updates, recording the state after each step count listed
/// in `sample_points` (ascending).
template <typename Scalar>
SaawetRun<Scalar> run_saawet(const ObservationSource<Scalar>& observe,
                             const SaawetConfig<Scalar>& config, std::int64_t steps,
                             std::span<const std::int64_t> sample_points) {
  detail::require(steps >= 1, ErrorCode::InvalidArgument, "steps must be at least 1");
  SaawetRun<Scalar> run{saawet_initial_state(config), {}};
  auto& state = run.final_state;
  auto next_sample = sample_points.begin();
  while (state.steps < steps) {
    const Vector<Scalar> y = observe(state.z, state.k);
    saawet_step(state, y, config.gains(state.k), config);
    if (next_sample != sample_points.end() && *next_sample == state.steps) {
      run.samples.push_back({state.steps, state.z, state.sigma});
      ++next_sample;
    }
  }
  return run;
}

}  // namespace drpr
