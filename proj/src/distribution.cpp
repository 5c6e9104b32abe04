#include "gphase/distribution.hpp"

#include <cmath>
#include <stdexcept>

#include "gphase/math_util.hpp"

namespace gphase {

double trapezoid_mass(const PhaseDistribution& dist) {
  double m = 0.0;
  for (std::size_t i = 0; i < dist.n(); ++i) m += dist.weight(i) * dist.density[i];
  return m;
}

bool nearly_normalized(const PhaseDistribution& dist, double tol) {
  return std::abs(trapezoid_mass(dist) - 1.0) <= tol;
}

void normalize(PhaseDistribution& dist) {
  double m = trapezoid_mass(dist);
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw std::runtime_error("cannot normalize: non-positive or non-finite mass");
  }
  for (double& d : dist.density) d /= m;
}

PhaseDistribution gaussian_prior(double mean, double sigma2, std::size_t n_grid,
                                 bool allow_wide) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("sigma2 must be positive and finite");
  }
  if (sigma2 > kMaxPriorSigma2 && !allow_wide) {
    throw std::out_of_range("sigma2 above 0.2; pass allow_wide to override");
  }
  if (!(mean >= 0.0) || !(mean < kPi)) {
    throw std::invalid_argument("prior mean must lie in [0, pi)");
  }
  if (n_grid < kMinThetaGridSize) {
    throw std::invalid_argument("theta grid needs at least 501 points");
  }
  PhaseDistribution dist;
  dist.theta0 = 0.0;
  dist.h = kPi / static_cast<double>(n_grid - 1);
  dist.density.resize(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) {
    double d = dist.theta(i) - mean;
    dist.density[i] = std::exp(-d * d / (2.0 * sigma2));
  }
  normalize(dist);
  return dist;
}

PosteriorSummary summarize(const PhaseDistribution& dist) {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < dist.n(); ++i) {
    double wd = dist.weight(i) * dist.density[i];
    double t = dist.theta(i);
    m0 += wd;
    m1 += wd * t;
    m2 += wd * t * t;
  }
  PosteriorSummary s;
  s.mean = m1 / m0;
  s.variance = m2 / m0 - s.mean * s.mean;
  if (s.variance < 0.0) s.variance = 0.0;
  return s;
}

}  // namespace gphase
