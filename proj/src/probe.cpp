#include "gphase/probe.hpp"

#include <cmath>
#include <stdexcept>

#include "gphase/math_util.hpp"

namespace gphase {

ProbeState::ProbeState(double alpha_mag_, double tau_, double r_, double phi_)
    : alpha_mag(alpha_mag_), tau(wrap_two_pi(tau_)), r(r_), phi(wrap_two_pi(phi_)) {
  if (!std::isfinite(alpha_mag_) || !std::isfinite(tau_) || !std::isfinite(r_) ||
      !std::isfinite(phi_)) {
    throw std::invalid_argument("probe parameters must be finite");
  }
  if (alpha_mag_ < 0.0) throw std::invalid_argument("alpha_mag must be >= 0");
  if (r_ < 0.0) throw std::invalid_argument("r must be >= 0");
}

double energy(const ProbeState& probe) {
  double sh = std::sinh(probe.r);
  return probe.alpha_mag * probe.alpha_mag + sh * sh;
}

double squeeze_from_energy(double E, double alpha_mag) {
  if (!(E >= 0.0) || !std::isfinite(E)) {
    throw std::invalid_argument("energy budget must be finite and >= 0");
  }
  if (alpha_mag < 0.0) throw std::invalid_argument("alpha_mag must be >= 0");
  double rest = E - alpha_mag * alpha_mag;
  // Tolerate rounding when alpha_mag was computed as sqrt(E).
  if (rest < -1e-12 * std::max(1.0, E)) {
    throw std::domain_error("alpha_mag^2 exceeds the energy budget");
  }
  return std::asinh(std::sqrt(std::max(0.0, rest)));
}

Moments rotated_moments(const ProbeState& probe, double theta) {
  Moments m;
  double amp = kSqrt2 * probe.alpha_mag;
  m.mean << amp * std::cos(probe.tau - theta), amp * std::sin(probe.tau - theta);
  double ch = std::cosh(2.0 * probe.r);
  double sh = std::sinh(2.0 * probe.r);
  double c = std::cos(2.0 * theta + probe.phi);
  double s = std::sin(2.0 * theta + probe.phi);
  m.cov << 0.5 * (ch - c * sh), 0.5 * s * sh,
           0.5 * s * sh, 0.5 * (ch + c * sh);
  return m;
}

}  // namespace gphase
