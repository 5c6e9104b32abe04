#pragma once

#include "gphase/probe.hpp"
#include "gphase/random.hpp"

namespace gphase {

// Position-quadrature outcome statistics. sigma2 is the true Gaussian
// variance; it equals half the cosh/cos combination that appears in the
// likelihood exponent (the exponent's denominator is 2*sigma2).
struct HomodyneParams {
  double mu = 0.0;
  double sigma2 = 0.5;
};

HomodyneParams outcome_params(const ProbeState& probe, double theta);

// Density of outcome q given phase theta: a normal density with the
// parameters above. Integrates to 1 over q.
double likelihood(const ProbeState& probe, double theta, double q);

// Draws one outcome from the density above.
double sample_outcome(const ProbeState& probe, double theta, RandomStream& rng);

}  // namespace gphase
