#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gphase/bayes.hpp"
#include "gphase/distribution.hpp"
#include "gphase/optimizer.hpp"
#include "gphase/probe.hpp"
#include "gphase/random.hpp"

namespace gphase {

enum class Tier {
  FixedLocal,          // fixed probe, asymptotic energy split
  FixedBayes,          // fixed probe, split optimized for the initial prior
  AngleAdaptiveLocal,  // angles track the estimate, asymptotic split
  AngleAdaptiveBayes,  // angles track the estimate, initial-prior split
  Predetermined,       // per-round probe from the expected-variance schedule
  FullyAdaptive,       // split, family and angles re-chosen every round
};

const char* tier_name(Tier tier);
std::optional<Tier> tier_from_name(const std::string& name);

struct ScheduleEntry {
  double sigma2 = 0.0;  // expected prior variance entering the round
  double alpha2 = 0.0;  // displacement energy of the chosen probe
  // Below the family crossover the better probe is all-squeezing; alpha2 is
  // then zero and angle_offset carries its squeezing-angle offset.
  bool squeezed_only = false;
  double angle_offset = 0.0;
};

struct StrategySpec {
  Tier tier = Tier::FixedLocal;
  double E = 0.0;
  // Consumed by Predetermined; computed via build_schedule when empty.
  std::vector<ScheduleEntry> schedule;
  // FullyAdaptive variant that reruns the full 3-parameter multi-start
  // search every round. Expensive; excluded from default runs.
  bool full_search_per_round = false;
};

// Expected-variance recursion: each round takes the better of the two probe
// families at the current expected variance and advances it to that optimum's
// apv. Runs entirely before any measurement.
std::vector<ScheduleEntry> build_schedule(double E, double sigma2_0,
                                          std::size_t n_rounds,
                                          std::size_t n_grid = kDefaultThetaGridSize);

struct RefitResult {
  PhaseDistribution dist;
  bool clamped = false;  // variance was pulled into (0, 0.2]
};

// Gaussian with the input's mean and variance on the same grid.
RefitResult gaussian_refit(const PhaseDistribution& dist);

// Per-round probe choices for the squeezed-vacuum / displaced families as a
// function of the running variance estimate, precomputed on a log-variance
// grid so adaptive tiers avoid a quadrature optimization per round.
class ProbePolicy {
 public:
  ProbePolicy(double E, std::size_t n_grid = kDefaultThetaGridSize,
              std::size_t n_nodes = 25, double sigma2_lo = 2e-4,
              double sigma2_hi = kMaxPriorSigma2);

  double E() const { return E_; }
  // Better-family probe for the estimated variance, centered on est_mean.
  ProbeState select(double sigma2_hat, double est_mean) const;

 private:
  double E_;
  std::vector<double> log_s2_, hus_frac_, hus_apv_, lus_C_, lus_apv_;
};

// Immutable prepared form of a StrategySpec: fixed probes, schedule and
// policy are computed once and shared across trajectories.
class Strategy {
 public:
  Strategy(const StrategySpec& spec, const PhaseDistribution& initial_prior);

  const StrategySpec& spec() const { return spec_; }
  bool needs_estimate() const;
  // est_mean/est_var are the Gaussian-refit moments of the current posterior
  // (clamped as gaussian_refit clamps); ignored by the fixed tiers.
  ProbeState probe_for_round(std::size_t round, double est_mean,
                             double est_var) const;

 private:
  StrategySpec spec_;
  std::size_t n_grid_;
  ProbeState fixed_probe_;
  double angle_adaptive_alpha2_ = 0.0;
  std::optional<ProbePolicy> policy_;
};

struct TrajectoryResult {
  std::vector<PosteriorSummary> rounds;
  bool aborted = false;
  std::size_t aborted_round = 0;
};

TrajectoryResult run_trajectory(const Strategy& strategy,
                                const PhaseDistribution& prior, double true_theta,
                                std::size_t n_rounds, RandomStream& rng);

struct EnsembleResult {
  std::size_t n_rounds = 0;
  std::vector<double> mean_apv;         // per round, over completed trajectories
  std::vector<double> std_err;          // per round
  std::vector<double> final_estimates;  // per completed trajectory
  std::size_t aborted = 0;
  std::uint64_t seed = 0;
};

// Draws true theta from the prior per trajectory (child stream k derives
// from (seed, k)), runs trajectories concurrently, reduces in index order.
// Fails when more than 1% of trajectories abort.
EnsembleResult run_ensemble(const StrategySpec& spec,
                            const PhaseDistribution& prior, std::size_t n_traj,
                            std::size_t n_rounds, std::uint64_t seed);

}  // namespace gphase
