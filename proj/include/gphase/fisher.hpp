#pragma once

#include "gphase/distribution.hpp"
#include "gphase/probe.hpp"

namespace gphase {

struct FisherReport {
  double fi = 0.0;
  double qfi = 0.0;
  double theta = 0.0;
};

// Closed-form Fisher information of the homodyne outcome density:
// 2 (2|alpha|^2 S sin^2(theta - tau) + sinh^2(2r) sin^2(2 theta + phi)) / S^2
// with S = cosh(2r) - cos(phi + 2 theta) sinh(2r).
double fisher_information(const ProbeState& probe, double theta);

// 4 |alpha|^2 e^{2r}: the closed form under the geometry tau = est - pi/2,
// phi = -2 est, evaluated at theta = est.
double fisher_hus(double alpha_mag, double r);

// Quantum Fisher information of the probe:
// 2 sinh^2(2r) + 4 |alpha|^2 (cosh 2r - cos(2 tau + phi) sinh 2r).
// Reduces to 2 sinh^2(2r) at |alpha| = 0 and dominates fisher_information
// at every theta.
double qfi(const ProbeState& probe);

// Bundles both quantities at an evaluation point; throws if the dominance
// invariant fi <= qfi + 1e-9 is violated.
FisherReport fisher_report(const ProbeState& probe, double theta);

// Prior-weighted Fisher information by quadrature on the prior grid.
double average_fisher(const ProbeState& probe, const PhaseDistribution& prior);

// 1 / (prior FI + avg_fi); prior FI from log-density finite differences on
// the grid (central interior, second-order one-sided ends).
double van_trees_bound(const PhaseDistribution& prior, double avg_fi);

// 1 / (1/sigma2 + 8 E (E+1)): measurement-independent lower bound on the
// average posterior variance at energy E.
double quantum_van_trees(double sigma2_prior, double E);

struct LocalSplit {
  double alpha2 = 0.0;
  double r = 0.0;
};

// Asymptotically optimal energy split for the displaced family:
// alpha^2 = E(E+1)/(2E+1), r = log(2E+1)/2.
LocalSplit optimal_local_split(double E);

// arccos(tanh(2 arcsinh(sqrt(E)))): squeezing-angle offset that maximizes
// the Fisher information of the squeezed-vacuum family.
double lus_asymptotic_angle(double E);

}  // namespace gphase
