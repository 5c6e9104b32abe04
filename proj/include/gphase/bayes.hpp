#pragma once

#include <cstddef>
#include <optional>

#include "gphase/distribution.hpp"
#include "gphase/homodyne.hpp"
#include "gphase/probe.hpp"
#include "gphase/random.hpp"

namespace gphase {

// Outer-integral quadrature controls for apv. The q grid spans
// [mu_min - q_pad_sd * s_max, mu_max + q_pad_sd * s_max], with mu and s
// extremized over the theta-grid points within prior mean +- prior_window_sd
// prior standard deviations.
struct QuadratureSpec {
  std::size_t n_q = 801;
  double prior_window_sd = 5.0;
  double q_pad_sd = 8.0;
};

struct ApvResult {
  double apv = 0.0;
  // Variance of the posterior mean under the outcome density; together with
  // apv it recovers the prior variance (law of total variance).
  double posterior_mean_variance = 0.0;
  double excluded_mass = 0.0;
  double prior_variance = 0.0;
  double q_lo = 0.0;
  double q_hi = 0.0;
  std::size_t n_q = 0;
};

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_underflow = 0;
};

// Bayes update for outcome q. Empty when the unnormalized mass underflows
// (outcome wildly inconsistent with the prior); callers count such cases.
std::optional<PhaseDistribution> posterior_update(const PhaseDistribution& prior,
                                                  const ProbeState& probe, double q);

// p(q) = integral of likelihood * prior over the grid.
double marginal_density(const PhaseDistribution& prior, const ProbeState& probe,
                        double q);

// Average posterior variance by double quadrature (outer over q, inner over
// theta). Outcomes whose marginal mass underflows are excluded and the rest
// renormalized; the excluded mass is reported.
ApvResult apv(const ProbeState& probe, const PhaseDistribution& prior,
              const QuadratureSpec& spec = {});

// Monte Carlo estimate of the same quantity: theta ~ prior, q ~ likelihood,
// posterior variance averaged over samples. Independent of the quadrature
// path except for the shared Bayes update.
MonteCarloEstimate apv_monte_carlo(const ProbeState& probe,
                                   const PhaseDistribution& prior,
                                   std::size_t n_samples, RandomStream& rng);

// Draws theta from the distribution by inverse CDF on the grid.
double sample_theta(const PhaseDistribution& dist, RandomStream& rng);

}  // namespace gphase
