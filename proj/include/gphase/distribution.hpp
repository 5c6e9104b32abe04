#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace gphase {

inline constexpr std::size_t kDefaultThetaGridSize = 2001;
inline constexpr std::size_t kMinThetaGridSize = 501;
inline constexpr double kMaxPriorSigma2 = 0.2;

// Discretized density over the phase interval. The grid is uniform from
// theta0 to theta0 + (n-1)*h; factory functions always build it on [0, pi]
// (theta = pi is the same phase as 0; priors in scope put negligible mass
// there). Integrals use the trapezoid rule.
struct PhaseDistribution {
  double theta0 = 0.0;
  double h = 0.0;
  std::vector<double> density;

  std::size_t n() const { return density.size(); }
  double theta(std::size_t i) const { return theta0 + static_cast<double>(i) * h; }
  // Trapezoid weight of node i (h at interior nodes, h/2 at the ends).
  double weight(std::size_t i) const {
    return (i == 0 || i + 1 == density.size()) ? 0.5 * h : h;
  }
};

struct PosteriorSummary {
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> outcome;  // set when the summary came from an update
};

double trapezoid_mass(const PhaseDistribution& dist);
bool nearly_normalized(const PhaseDistribution& dist, double tol = 1e-9);
// Rescales the density to unit trapezoid mass.
void normalize(PhaseDistribution& dist);

// Truncated Gaussian prior on [0, pi], renormalized on the grid.
// sigma2 must lie in (0, 0.2] unless allow_wide is set; n_grid >= 501.
PhaseDistribution gaussian_prior(double mean, double sigma2,
                                 std::size_t n_grid = kDefaultThetaGridSize,
                                 bool allow_wide = false);

// Grid mean and variance by trapezoid quadrature.
PosteriorSummary summarize(const PhaseDistribution& dist);

}  // namespace gphase
