#include "gphase/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gphase/fisher.hpp"
#include "gphase/math_util.hpp"
#include "gphase/parallel.hpp"

namespace gphase {

const char* tier_name(Tier tier) {
  switch (tier) {
    case Tier::FixedLocal: return "fixed_local";
    case Tier::FixedBayes: return "fixed_bayes";
    case Tier::AngleAdaptiveLocal: return "angle_adaptive_local";
    case Tier::AngleAdaptiveBayes: return "angle_adaptive_bayes";
    case Tier::Predetermined: return "predetermined";
    case Tier::FullyAdaptive: return "fully_adaptive";
  }
  return "unknown";
}

std::optional<Tier> tier_from_name(const std::string& name) {
  for (Tier t : {Tier::FixedLocal, Tier::FixedBayes, Tier::AngleAdaptiveLocal,
                 Tier::AngleAdaptiveBayes, Tier::Predetermined,
                 Tier::FullyAdaptive}) {
    if (name == tier_name(t)) return t;
  }
  return std::nullopt;
}

std::vector<ScheduleEntry> build_schedule(double E, double sigma2_0,
                                          std::size_t n_rounds,
                                          std::size_t n_grid) {
  if (!(E > 0.0) || !(sigma2_0 > 0.0) || n_rounds == 0) {
    throw std::invalid_argument("build_schedule: bad arguments");
  }
  std::vector<ScheduleEntry> schedule;
  schedule.reserve(n_rounds);
  double s2 = std::min(sigma2_0, kMaxPriorSigma2);
  for (std::size_t k = 0; k < n_rounds; ++k) {
    PhaseDistribution prior = gaussian_prior(0.5 * kPi, s2, n_grid);
    Optimum hus = optimize_hus(E, prior);
    Optimum lus = optimize_lus(E, prior);
    const Optimum& best = hus.apv <= lus.apv ? hus : lus;
    ScheduleEntry entry;
    entry.sigma2 = s2;
    if (best.family.kind == FamilyKind::HUS) {
      entry.alpha2 = best.probe.alpha_mag * best.probe.alpha_mag;
    } else {
      entry.squeezed_only = true;
      entry.angle_offset = wrap_pm_pi(best.probe.phi + kPi);  // centered at pi/2
    }
    schedule.push_back(entry);
    if (!(best.apv > 0.0) || best.apv >= s2) break;  // no further expected gain
    s2 = best.apv;
  }
  return schedule;
}

RefitResult gaussian_refit(const PhaseDistribution& dist) {
  PosteriorSummary s = summarize(dist);
  RefitResult out;
  double v = s.variance;
  if (v > kMaxPriorSigma2) {
    v = kMaxPriorSigma2;
    out.clamped = true;
  }
  if (v < 1e-12) {
    v = 1e-12;
    out.clamped = true;
  }
  double mean = std::clamp(s.mean, 0.0, kPi * (1.0 - 1e-12));
  out.dist = gaussian_prior(mean, v, dist.n());
  return out;
}

ProbePolicy::ProbePolicy(double E, std::size_t n_grid, std::size_t n_nodes,
                         double sigma2_lo, double sigma2_hi)
    : E_(E) {
  if (!(E > 0.0) || n_nodes < 2 || !(sigma2_lo > 0.0) || !(sigma2_hi > sigma2_lo)) {
    throw std::invalid_argument("ProbePolicy: bad arguments");
  }
  const double llo = std::log(sigma2_lo), lhi = std::log(sigma2_hi);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    double ls = llo + (lhi - llo) * static_cast<double>(i) /
                          static_cast<double>(n_nodes - 1);
    double s2 = std::exp(ls);
    PhaseDistribution prior = gaussian_prior(0.5 * kPi, s2, n_grid);
    Optimum oh = optimize_hus(E, prior);
    Optimum ol = optimize_lus(E, prior);
    log_s2_.push_back(ls);
    hus_frac_.push_back(oh.probe.alpha_mag * oh.probe.alpha_mag / E);
    hus_apv_.push_back(oh.apv);
    lus_C_.push_back(wrap_pm_pi(ol.probe.phi + kPi));  // centered at pi/2
    lus_apv_.push_back(ol.apv);
  }
}

ProbeState ProbePolicy::select(double sigma2_hat, double est_mean) const {
  double ls = std::log(std::clamp(sigma2_hat, std::exp(log_s2_.front()),
                                  std::exp(log_s2_.back())));
  auto it = std::upper_bound(log_s2_.begin(), log_s2_.end(), ls);
  std::size_t j = static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(it - log_s2_.begin(), 1,
                                 static_cast<std::ptrdiff_t>(log_s2_.size()) - 1));
  double t = (ls - log_s2_[j - 1]) / (log_s2_[j] - log_s2_[j - 1]);
  t = std::clamp(t, 0.0, 1.0);
  auto lerp = [&](const std::vector<double>& v) {
    return v[j - 1] + t * (v[j] - v[j - 1]);
  };
  if (lerp(hus_apv_) <= lerp(lus_apv_)) {
    return hus_probe(E_, std::clamp(lerp(hus_frac_), 0.0, 1.0) * E_, est_mean);
  }
  return lus_probe(E_, lerp(lus_C_), est_mean);
}

Strategy::Strategy(const StrategySpec& spec, const PhaseDistribution& initial_prior)
    : spec_(spec), n_grid_(initial_prior.n()) {
  if (!(spec.E >= 0.0)) throw std::invalid_argument("Strategy: negative energy");
  PosteriorSummary ps = summarize(initial_prior);
  const double est0 = ps.mean;
  switch (spec_.tier) {
    case Tier::FixedLocal:
    case Tier::AngleAdaptiveLocal: {
      LocalSplit split = optimal_local_split(spec_.E);
      angle_adaptive_alpha2_ = split.alpha2;
      fixed_probe_ = hus_probe(spec_.E, split.alpha2, est0);
      break;
    }
    case Tier::FixedBayes:
    case Tier::AngleAdaptiveBayes: {
      if (spec_.E > 0.0) {
        Optimum opt = optimize_hus(spec_.E, initial_prior);
        angle_adaptive_alpha2_ = opt.probe.alpha_mag * opt.probe.alpha_mag;
        fixed_probe_ = opt.probe;
      }
      break;
    }
    case Tier::Predetermined: {
      if (spec_.schedule.empty()) {
        spec_.schedule = build_schedule(spec_.E, ps.variance, 32, n_grid_);
      }
      break;
    }
    case Tier::FullyAdaptive: {
      if (!spec_.full_search_per_round) {
        policy_.emplace(spec_.E, n_grid_);
      }
      break;
    }
  }
}

bool Strategy::needs_estimate() const {
  return spec_.tier != Tier::FixedLocal && spec_.tier != Tier::FixedBayes;
}

ProbeState Strategy::probe_for_round(std::size_t round, double est_mean,
                                     double est_var) const {
  switch (spec_.tier) {
    case Tier::FixedLocal:
    case Tier::FixedBayes:
      return fixed_probe_;
    case Tier::AngleAdaptiveLocal:
    case Tier::AngleAdaptiveBayes:
      return hus_probe(spec_.E, angle_adaptive_alpha2_, est_mean);
    case Tier::Predetermined: {
      std::size_t k = std::min(round, spec_.schedule.size() - 1);
      const ScheduleEntry& entry = spec_.schedule[k];
      if (entry.squeezed_only) {
        return lus_probe(spec_.E, entry.angle_offset, est_mean);
      }
      return hus_probe(spec_.E, entry.alpha2, est_mean);
    }
    case Tier::FullyAdaptive: {
      if (policy_) return policy_->select(est_var, est_mean);
      PhaseDistribution prior = gaussian_prior(
          std::clamp(est_mean, 0.0, kPi * (1.0 - 1e-12)),
          std::clamp(est_var, 1e-12, kMaxPriorSigma2), n_grid_);
      auto minima = optimize_full(spec_.E, prior, default_starts(spec_.E, est_mean));
      if (minima.empty()) throw std::runtime_error("full search found no minima");
      return minima.front().probe;
    }
  }
  throw std::logic_error("probe_for_round: unknown tier");
}

TrajectoryResult run_trajectory(const Strategy& strategy,
                                const PhaseDistribution& prior, double true_theta,
                                std::size_t n_rounds, RandomStream& rng) {
  if (!(true_theta >= 0.0) || !(true_theta < kPi)) {
    throw std::invalid_argument("run_trajectory: true_theta outside [0, pi)");
  }
  if (n_rounds == 0) throw std::invalid_argument("run_trajectory: n_rounds == 0");

  TrajectoryResult result;
  PhaseDistribution dist = prior;
  double est_mean = 0.5 * kPi, est_var = kMaxPriorSigma2;
  if (strategy.needs_estimate()) {
    PosteriorSummary s = summarize(dist);
    est_mean = s.mean;
    est_var = std::clamp(s.variance, 1e-12, kMaxPriorSigma2);
  }
  for (std::size_t k = 0; k < n_rounds; ++k) {
    ProbeState probe = strategy.probe_for_round(k, est_mean, est_var);
    double q = sample_outcome(probe, true_theta, rng);
    auto post = posterior_update(dist, probe, q);
    if (!post) {
      result.aborted = true;
      result.aborted_round = k;
      return result;
    }
    dist = std::move(*post);
    PosteriorSummary s = summarize(dist);
    if (strategy.needs_estimate()) {
      est_mean = std::clamp(s.mean, 0.0, kPi * (1.0 - 1e-12));
      est_var = std::clamp(s.variance, 1e-12, kMaxPriorSigma2);
    }
    s.outcome = q;
    result.rounds.push_back(s);
  }
  return result;
}

EnsembleResult run_ensemble(const StrategySpec& spec,
                            const PhaseDistribution& prior, std::size_t n_traj,
                            std::size_t n_rounds, std::uint64_t seed) {
  if (n_traj < 100) throw std::invalid_argument("run_ensemble: need >= 100 trajectories");
  StrategySpec prepared = spec;
  if (prepared.tier == Tier::Predetermined && prepared.schedule.empty()) {
    prepared.schedule = build_schedule(prepared.E, summarize(prior).variance,
                                       n_rounds, prior.n());
  }
  Strategy strategy(prepared, prior);
  RandomStream master(seed);

  std::vector<TrajectoryResult> results(n_traj);
  parallel_for(n_traj, [&](std::size_t k) {
    RandomStream stream = master.child(k);
    double theta = std::clamp(sample_theta(prior, stream), 0.0,
                              kPi * (1.0 - 1e-12));
    results[k] = run_trajectory(strategy, prior, theta, n_rounds, stream);
  });

  EnsembleResult out;
  out.n_rounds = n_rounds;
  out.seed = seed;
  out.mean_apv.assign(n_rounds, 0.0);
  out.std_err.assign(n_rounds, 0.0);
  std::vector<double> sum(n_rounds, 0.0), sum_sq(n_rounds, 0.0);
  std::size_t completed = 0;
  for (const TrajectoryResult& tr : results) {
    if (tr.aborted) {
      ++out.aborted;
      continue;
    }
    ++completed;
    for (std::size_t k = 0; k < n_rounds; ++k) {
      double v = tr.rounds[k].variance;
      sum[k] += v;
      sum_sq[k] += v * v;
    }
    out.final_estimates.push_back(tr.rounds.back().mean);
  }
  if (out.aborted * 100 > n_traj) {
    throw std::runtime_error("run_ensemble: more than 1% of trajectories aborted");
  }
  if (completed == 0) throw std::runtime_error("run_ensemble: no trajectory completed");
  double nc = static_cast<double>(completed);
  for (std::size_t k = 0; k < n_rounds; ++k) {
    double m = sum[k] / nc;
    out.mean_apv[k] = m;
    if (completed > 1) {
      double var = std::max(0.0, (sum_sq[k] - nc * m * m) / (nc - 1.0));
      out.std_err[k] = std::sqrt(var / nc);
    }
  }
  return out;
}

}  // namespace gphase
