#pragma once

#include <array>
#include <string>
#include <vector>

#include "gphase/bayes.hpp"
#include "gphase/distribution.hpp"
#include "gphase/probe.hpp"

namespace gphase {

enum class FamilyKind { HUS, LUS, FULL };

struct FamilySpec {
  FamilyKind kind = FamilyKind::HUS;
  double E = 0.0;
};

struct Optimum {
  ProbeState probe;
  double apv = 0.0;
  FamilySpec family;
  std::array<double, 3> start{};  // (alpha_mag, tau, phi) the search began from
  bool converged = false;
  // Set when the prior variance is below 0.002, where quadrature noise makes
  // minima locations unreliable.
  bool low_confidence = false;
};

// Prior variances below this flag optima as low-confidence.
inline constexpr double kLowConfidenceSigma2 = 0.002;

// Displaced-family probe: tau = est - pi/2, phi = -2 est, squeezing from the
// remaining budget.
ProbeState hus_probe(double E, double alpha2, double est_mean);

// Squeezed-vacuum probe with squeezing-angle offset C = phi + 2 est.
ProbeState lus_probe(double E, double C, double est_mean);

// Minimizes apv over the displacement fraction (logit-bounded on [0, E]).
Optimum optimize_hus(double E, const PhaseDistribution& prior,
                     const QuadratureSpec& quad = {});

// Minimizes apv over the squeezing angle at |alpha| = 0; the reported offset
// C is canonicalized to its non-negative mirror image.
Optimum optimize_lus(double E, const PhaseDistribution& prior,
                     const QuadratureSpec& quad = {});

// Local minimization from each start over (|alpha|, tau, phi) with r bound
// by the energy budget; returns deduplicated local minima, best first.
std::vector<Optimum> optimize_full(double E, const PhaseDistribution& prior,
                                   const std::vector<std::array<double, 3>>& starts,
                                   const QuadratureSpec& quad = {});

// Eight stratified starts, four near each family.
std::vector<std::array<double, 3>> default_starts(double E, double est_mean);

struct SweepRow {
  double sigma2 = 0.0;
  double alpha2_over_E = 0.0;
  double tau = 0.0;
  double phi = 0.0;
  double apv = 0.0;
  double apv_over_sigma2 = 0.0;
  bool ok = false;
  std::string note;
};

// Family optimization per sigma2 value. Failures become rows with ok=false
// and the reason in note.
std::vector<SweepRow> sweep(double E, const std::vector<double>& sigma2_values,
                            const FamilySpec& family,
                            std::size_t n_grid = kDefaultThetaGridSize);

// Bisects sign(apv_hus - apv_lus) to locate the prior variance where the
// two families tie, to resolution 1e-4. Requires a sign change on [lo, hi].
double crossover_sigma2(double E, double lo, double hi,
                        std::size_t n_grid = kDefaultThetaGridSize);

}  // namespace gphase
