#pragma once

#include <Eigen/Core>

namespace gphase {

// Pure single-mode Gaussian probe: displacement magnitude and angle,
// squeezing strength and angle. Angles are normalized to [0, 2*pi) on
// construction; the physics is 2*pi-periodic in both.
struct ProbeState {
  double alpha_mag = 0.0;
  double tau = 0.0;
  double r = 0.0;
  double phi = 0.0;

  ProbeState() = default;
  ProbeState(double alpha_mag_, double tau_, double r_, double phi_);
};

// First and second phase-space moments after rotating the probe by theta.
struct Moments {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
};

// |alpha|^2 + sinh^2(r): total mean photon number.
double energy(const ProbeState& probe);

// Squeezing strength that exhausts the energy budget E after allocating
// alpha_mag^2 to displacement. Rejects alpha_mag^2 > E.
double squeeze_from_energy(double E, double alpha_mag);

// mean = sqrt(2)|alpha| (cos(tau-theta), sin(tau-theta));
// cov  = 1/2 [[cosh2r - cos(2theta+phi) sinh2r,  sin(2theta+phi) sinh2r],
//             [sin(2theta+phi) sinh2r,  cosh2r + cos(2theta+phi) sinh2r]].
Moments rotated_moments(const ProbeState& probe, double theta);

}  // namespace gphase
