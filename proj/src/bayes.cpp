#include "gphase/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gphase/math_util.hpp"

namespace gphase {

namespace {

constexpr double kUnderflowMass = 1e-280;

void require_normalized(const PhaseDistribution& dist, const char* who) {
  if (!nearly_normalized(dist)) {
    throw std::invalid_argument(std::string(who) + ": distribution is not normalized");
  }
}

}  // namespace

std::optional<PhaseDistribution> posterior_update(const PhaseDistribution& prior,
                                                  const ProbeState& probe, double q) {
  require_normalized(prior, "posterior_update");
  PhaseDistribution post = prior;
  double mass = 0.0;
  for (std::size_t i = 0; i < post.n(); ++i) {
    post.density[i] *= likelihood(probe, post.theta(i), q);
    mass += post.weight(i) * post.density[i];
  }
  if (!std::isfinite(mass) || mass < kUnderflowMass) return std::nullopt;
  for (double& d : post.density) d /= mass;
  return post;
}

double marginal_density(const PhaseDistribution& prior, const ProbeState& probe,
                        double q) {
  require_normalized(prior, "marginal_density");
  double mass = 0.0;
  for (std::size_t i = 0; i < prior.n(); ++i) {
    mass += prior.weight(i) * prior.density[i] * likelihood(probe, prior.theta(i), q);
  }
  return mass;
}

ApvResult apv(const ProbeState& probe, const PhaseDistribution& prior,
              const QuadratureSpec& spec) {
  require_normalized(prior, "apv");
  if (spec.n_q < 2) throw std::invalid_argument("apv: n_q must be >= 2");

  const std::size_t n = prior.n();
  PosteriorSummary ps = summarize(prior);
  const double sp = std::sqrt(ps.variance);

  // Per-theta likelihood parameters and prior-weighted coefficients.
  std::vector<double> th(n), mu(n), inv2s(n), coef(n);
  double win_lo = std::max(prior.theta(0), ps.mean - spec.prior_window_sd * sp);
  double win_hi = std::min(prior.theta(n - 1), ps.mean + spec.prior_window_sd * sp);
  double mu_lo = 0.0, mu_hi = 0.0, s2max = 0.0;
  bool any_in_window = false;
  for (std::size_t i = 0; i < n; ++i) {
    th[i] = prior.theta(i);
    HomodyneParams hp = outcome_params(probe, th[i]);
    mu[i] = hp.mu;
    inv2s[i] = 1.0 / (2.0 * hp.sigma2);
    coef[i] = prior.weight(i) * prior.density[i] /
              std::sqrt(kTwoPi * hp.sigma2);
    if (th[i] >= win_lo && th[i] <= win_hi) {
      if (!any_in_window) {
        mu_lo = mu_hi = hp.mu;
        any_in_window = true;
      } else {
        mu_lo = std::min(mu_lo, hp.mu);
        mu_hi = std::max(mu_hi, hp.mu);
      }
      s2max = std::max(s2max, hp.sigma2);
    }
  }
  if (!any_in_window) throw std::logic_error("apv: empty prior window");

  ApvResult res;
  res.prior_variance = ps.variance;
  res.n_q = spec.n_q;
  res.q_lo = mu_lo - spec.q_pad_sd * std::sqrt(s2max);
  res.q_hi = mu_hi + spec.q_pad_sd * std::sqrt(s2max);
  const double hq = (res.q_hi - res.q_lo) / static_cast<double>(spec.n_q - 1);

  double mass = 0.0, acc_v = 0.0, acc_m = 0.0, acc_m2 = 0.0;
  for (std::size_t k = 0; k < spec.n_q; ++k) {
    double q = res.q_lo + static_cast<double>(k) * hq;
    double wq = (k == 0 || k + 1 == spec.n_q) ? 0.5 * hq : hq;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = q - mu[i];
      double a = coef[i] * std::exp(-d * d * inv2s[i]);
      s0 += a;
      s1 += a * th[i];
      s2 += a * th[i] * th[i];
    }
    if (!std::isfinite(s0) || s0 <= 0.0) continue;
    double pm = s1 / s0;
    double pv = s2 / s0 - pm * pm;
    mass += wq * s0;
    acc_v += wq * s0 * pv;
    acc_m += wq * s0 * pm;
    acc_m2 += wq * s0 * pm * pm;
  }
  if (!(mass > 0.0)) throw std::runtime_error("apv: all outcome mass underflowed");
  res.apv = acc_v / mass;
  double m1 = acc_m / mass;
  res.posterior_mean_variance = acc_m2 / mass - m1 * m1;
  res.excluded_mass = 1.0 - mass;
  return res;
}

double sample_theta(const PhaseDistribution& dist, RandomStream& rng) {
  const std::size_t n = dist.n();
  std::vector<double> cum(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    cum[i] = cum[i - 1] + 0.5 * dist.h * (dist.density[i - 1] + dist.density[i]);
  }
  double total = cum[n - 1];
  double u = rng.uniform() * total;
  auto it = std::lower_bound(cum.begin(), cum.end(), u);
  std::size_t j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
      1, it - cum.begin()));
  if (j >= n) j = n - 1;
  double seg = cum[j] - cum[j - 1];
  double frac = seg > 0.0 ? (u - cum[j - 1]) / seg : 0.5;
  return dist.theta(j - 1) + frac * dist.h;
}

MonteCarloEstimate apv_monte_carlo(const ProbeState& probe,
                                   const PhaseDistribution& prior,
                                   std::size_t n_samples, RandomStream& rng) {
  require_normalized(prior, "apv_monte_carlo");
  if (n_samples < 1000) {
    throw std::invalid_argument("apv_monte_carlo: need at least 1000 samples");
  }
  double sum = 0.0, sum_sq = 0.0;
  std::size_t kept = 0, underflow = 0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    double theta = sample_theta(prior, rng);
    double q = sample_outcome(probe, theta, rng);
    auto post = posterior_update(prior, probe, q);
    if (!post) {
      ++underflow;
      continue;
    }
    double v = summarize(*post).variance;
    sum += v;
    sum_sq += v * v;
    ++kept;
  }
  if (kept < 2) throw std::runtime_error("apv_monte_carlo: all samples underflowed");
  MonteCarloEstimate est;
  double nk = static_cast<double>(kept);
  est.estimate = sum / nk;
  double var = std::max(0.0, (sum_sq - nk * est.estimate * est.estimate) / (nk - 1.0));
  est.std_error = std::sqrt(var / nk);
  est.n_underflow = underflow;
  return est;
}

}  // namespace gphase
