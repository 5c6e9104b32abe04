#include "gphase/homodyne.hpp"

#include <cmath>

#include "gphase/math_util.hpp"

namespace gphase {

HomodyneParams outcome_params(const ProbeState& probe, double theta) {
  HomodyneParams p;
  p.mu = kSqrt2 * probe.alpha_mag * std::cos(probe.tau - theta);
  double big_sigma = std::cosh(2.0 * probe.r) -
                     std::cos(probe.phi + 2.0 * theta) * std::sinh(2.0 * probe.r);
  p.sigma2 = 0.5 * big_sigma;
  return p;
}

double likelihood(const ProbeState& probe, double theta, double q) {
  HomodyneParams p = outcome_params(probe, theta);
  double d = q - p.mu;
  return std::exp(-d * d / (2.0 * p.sigma2)) / std::sqrt(kTwoPi * p.sigma2);
}

double sample_outcome(const ProbeState& probe, double theta, RandomStream& rng) {
  HomodyneParams p = outcome_params(probe, theta);
  return p.mu + std::sqrt(p.sigma2) * rng.gaussian();
}

}  // namespace gphase
