#include "gphase/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gphase/math_util.hpp"
#include "gphase/fisher.hpp"
#include "gphase/nelder_mead.hpp"

namespace gphase {

namespace {

constexpr double kLogitClamp = 20.0;

double logistic(double u) {
  u = std::clamp(u, -kLogitClamp, kLogitClamp);
  return 1.0 / (1.0 + std::exp(-u));
}

double logit(double x) {
  x = std::clamp(x, 1e-8, 1.0 - 1e-8);
  return std::log(x / (1.0 - x));
}

NelderMeadResult minimize_with_retry(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, std::vector<double> step) {
  NelderMeadResult res = nelder_mead(f, x0, step);
  if (res.converged) return res;
  for (double& s : step) s *= 0.2;
  NelderMeadResult again = nelder_mead(f, res.x, step);
  return again;
}

// Mirror about the prior mean: theta -> 2 est - theta maps the probe to
// (tau -> 2 est - tau, C -> -C) and leaves the apv unchanged. Reported
// optima use the branch with C >= 0 (and, for displaced probes, the one
// with tau on the est - pi/2 side).
ProbeState canonical_probe(double E, double alpha_mag, double tau, double phi,
                           double est_mean) {
  double a = alpha_mag;
  double dtau = wrap_pm_pi(tau - est_mean);
  double C = wrap_pm_pi(phi + 2.0 * est_mean);
  double a_floor = 1e-4 * std::max(std::sqrt(E), 1e-4);
  if (std::abs(a) < a_floor) {
    a = 0.0;
    dtau = 0.0;
    if (C < 0.0) C = -C;
  } else if (std::sin(dtau) > 0.0) {
    dtau = -dtau;
    C = -C;
  }
  double r = squeeze_from_energy(E, a);
  return ProbeState(a, est_mean + dtau, r, C - 2.0 * est_mean);
}

double probe_param_distance(const ProbeState& a, const ProbeState& b,
                            double est_mean) {
  double d = std::abs(a.alpha_mag - b.alpha_mag);
  double Ca = wrap_pm_pi(a.phi + 2.0 * est_mean);
  double Cb = wrap_pm_pi(b.phi + 2.0 * est_mean);
  d = std::max(d, std::abs(Ca - Cb));
  if (a.alpha_mag > 1e-6 && b.alpha_mag > 1e-6) {
    d = std::max(d, angular_distance(a.tau, b.tau));
  }
  return d;
}

}  // namespace

ProbeState hus_probe(double E, double alpha2, double est_mean) {
  double a = std::sqrt(std::max(0.0, alpha2));
  return ProbeState(a, est_mean - 0.5 * kPi, squeeze_from_energy(E, a),
                    -2.0 * est_mean);
}

ProbeState lus_probe(double E, double C, double est_mean) {
  return ProbeState(0.0, 0.0, squeeze_from_energy(E, 0.0), C - 2.0 * est_mean);
}

Optimum optimize_hus(double E, const PhaseDistribution& prior,
                     const QuadratureSpec& quad) {
  if (!(E > 0.0)) throw std::invalid_argument("optimize_hus: E must be > 0");
  PosteriorSummary ps = summarize(prior);
  const double est = ps.mean;

  auto value = [&](double frac) {
    return apv(hus_probe(E, frac * E, est), prior, quad).apv;
  };

  double best_x = 0.03, best_v = value(0.03);
  for (int i = 1; i < 18; ++i) {
    double x = 0.03 + (0.97 - 0.03) * static_cast<double>(i) / 17.0;
    double v = value(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }

  auto f = [&](const std::vector<double>& u) { return value(logistic(u[0])); };
  NelderMeadResult nm = minimize_with_retry(f, {logit(best_x)}, {0.25});
  if (!nm.converged) {
    throw std::runtime_error("optimize_hus: simplex failed to converge");
  }
  double frac = logistic(nm.x[0]);

  Optimum opt;
  opt.probe = hus_probe(E, frac * E, est);
  opt.apv = nm.f;
  opt.family = {FamilyKind::HUS, E};
  opt.start = {std::sqrt(best_x * E), est - 0.5 * kPi, -2.0 * est};
  opt.converged = true;
  opt.low_confidence = ps.variance < kLowConfidenceSigma2;
  return opt;
}

Optimum optimize_lus(double E, const PhaseDistribution& prior,
                     const QuadratureSpec& quad) {
  if (!(E > 0.0)) throw std::invalid_argument("optimize_lus: E must be > 0");
  PosteriorSummary ps = summarize(prior);
  const double est = ps.mean;

  auto value = [&](double C) { return apv(lus_probe(E, C, est), prior, quad).apv; };

  double best_C = -kPi, best_v = value(-kPi);
  for (int i = 1; i < 25; ++i) {
    double C = -kPi + kTwoPi * static_cast<double>(i) / 24.0;
    double v = value(C);
    if (v < best_v) {
      best_v = v;
      best_C = C;
    }
  }

  auto f = [&](const std::vector<double>& u) { return value(u[0]); };
  NelderMeadResult nm = minimize_with_retry(f, {best_C}, {0.2});
  if (!nm.converged) {
    throw std::runtime_error("optimize_lus: simplex failed to converge");
  }
  double C = std::abs(wrap_pm_pi(nm.x[0]));

  Optimum opt;
  opt.probe = lus_probe(E, C, est);
  opt.apv = apv(opt.probe, prior, quad).apv;
  opt.family = {FamilyKind::LUS, E};
  opt.start = {0.0, 0.0, best_C - 2.0 * est};
  opt.converged = true;
  opt.low_confidence = ps.variance < kLowConfidenceSigma2;
  return opt;
}

std::vector<std::array<double, 3>> default_starts(double E, double est_mean) {
  const double A = lus_asymptotic_angle(E);
  const double sE = std::sqrt(E);
  std::vector<std::array<double, 3>> starts;
  // Displaced-family side.
  starts.push_back({std::sqrt(0.50 * E), est_mean - 0.5 * kPi, -2.0 * est_mean});
  starts.push_back({std::sqrt(0.75 * E), est_mean - 0.5 * kPi + 0.10, -2.0 * est_mean + 0.2});
  starts.push_back({std::sqrt(0.90 * E), est_mean - 0.5 * kPi - 0.10, -2.0 * est_mean - 0.2});
  starts.push_back({std::sqrt(0.60 * E), est_mean - 0.5 * kPi + 0.05, -2.0 * est_mean + 0.1});
  // Squeezed-vacuum side.
  starts.push_back({1e-3 * sE, 0.0, 0.5 * A - 2.0 * est_mean});
  starts.push_back({5e-2 * sE, 0.0, -0.5 * A - 2.0 * est_mean});
  starts.push_back({1e-3 * sE, 0.0, 1.5 * A - 2.0 * est_mean});
  starts.push_back({2e-2 * sE, 0.0, -1.5 * A - 2.0 * est_mean});
  return starts;
}

std::vector<Optimum> optimize_full(double E, const PhaseDistribution& prior,
                                   const std::vector<std::array<double, 3>>& starts,
                                   const QuadratureSpec& quad) {
  if (!(E > 0.0)) throw std::invalid_argument("optimize_full: E must be > 0");
  if (starts.size() < 2) {
    throw std::invalid_argument("optimize_full: need at least 2 starts");
  }
  PosteriorSummary ps = summarize(prior);
  const double est = ps.mean;
  const bool low_conf = ps.variance < kLowConfidenceSigma2;

  auto probe_of = [&](const std::vector<double>& x) {
    double alpha2 = logistic(x[0]) * E;
    double a = std::sqrt(alpha2);
    return ProbeState(a, x[1], squeeze_from_energy(E, a), x[2]);
  };
  auto f = [&](const std::vector<double>& x) {
    return apv(probe_of(x), prior, quad).apv;
  };

  std::vector<Optimum> found;
  for (const auto& s : starts) {
    double frac = std::clamp(s[0] * s[0] / E, 1e-8, 1.0 - 1e-8);
    std::vector<double> x0 = {logit(frac), s[1], s[2]};
    NelderMeadResult nm = minimize_with_retry(f, x0, {0.25, 0.1, 0.2});
    ProbeState raw = probe_of(nm.x);
    ProbeState canon = canonical_probe(E, raw.alpha_mag, raw.tau, raw.phi, est);
    Optimum opt;
    opt.probe = canon;
    opt.apv = apv(canon, prior, quad).apv;
    opt.family = {FamilyKind::FULL, E};
    opt.start = s;
    opt.converged = nm.converged;
    opt.low_confidence = low_conf;
    found.push_back(std::move(opt));
  }

  std::sort(found.begin(), found.end(), [](const Optimum& a, const Optimum& b) {
    if (a.converged != b.converged) return a.converged;
    return a.apv < b.apv;
  });
  std::vector<Optimum> unique;
  for (const auto& cand : found) {
    bool dup = false;
    for (const auto& kept : unique) {
      if (std::abs(cand.apv - kept.apv) <= 1e-7 &&
          probe_param_distance(cand.probe, kept.probe, est) <= 1e-3) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(cand);
  }
  return unique;
}

std::vector<SweepRow> sweep(double E, const std::vector<double>& sigma2_values,
                            const FamilySpec& family, std::size_t n_grid) {
  std::vector<SweepRow> rows(sigma2_values.size());
  for (std::size_t i = 0; i < sigma2_values.size(); ++i) {
    SweepRow& row = rows[i];
    row.sigma2 = sigma2_values[i];
    try {
      PhaseDistribution prior = gaussian_prior(0.5 * kPi, row.sigma2, n_grid);
      Optimum opt;
      switch (family.kind) {
        case FamilyKind::HUS:
          opt = optimize_hus(E, prior);
          break;
        case FamilyKind::LUS:
          opt = optimize_lus(E, prior);
          break;
        case FamilyKind::FULL: {
          auto minima = optimize_full(E, prior, default_starts(E, 0.5 * kPi));
          if (minima.empty()) throw std::runtime_error("no minima found");
          opt = minima.front();
          break;
        }
      }
      row.alpha2_over_E = opt.probe.alpha_mag * opt.probe.alpha_mag / E;
      row.tau = opt.probe.tau;
      row.phi = opt.probe.phi;
      row.apv = opt.apv;
      row.apv_over_sigma2 = opt.apv / row.sigma2;
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.note = e.what();
    }
  }
  return rows;
}

double crossover_sigma2(double E, double lo, double hi, std::size_t n_grid) {
  auto gap = [&](double s2) {
    PhaseDistribution prior = gaussian_prior(0.5 * kPi, s2, n_grid);
    return optimize_hus(E, prior).apv - optimize_lus(E, prior).apv;
  };
  double glo = gap(lo), ghi = gap(hi);
  // The squeezed-vacuum family must win at lo and lose at hi.
  if (!(glo > 0.0) || !(ghi < 0.0)) {
    throw std::runtime_error("crossover_sigma2: families do not cross on [lo, hi]");
  }
  while (hi - lo > 1e-4) {
    double mid = 0.5 * (lo + hi);
    if (gap(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace gphase
