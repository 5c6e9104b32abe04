#include "gphase/fisher.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gphase/math_util.hpp"

namespace gphase {

double fisher_information(const ProbeState& probe, double theta) {
  double sh2 = std::sinh(2.0 * probe.r);
  double big_sigma = std::cosh(2.0 * probe.r) -
                     std::cos(probe.phi + 2.0 * theta) * sh2;
  double st = std::sin(theta - probe.tau);
  double sa = std::sin(2.0 * theta + probe.phi);
  double a2 = probe.alpha_mag * probe.alpha_mag;
  return 2.0 * (2.0 * a2 * big_sigma * st * st + sh2 * sh2 * sa * sa) /
         (big_sigma * big_sigma);
}

double fisher_hus(double alpha_mag, double r) {
  return 4.0 * alpha_mag * alpha_mag * std::exp(2.0 * r);
}

double qfi(const ProbeState& probe) {
  double sh2 = std::sinh(2.0 * probe.r);
  double a2 = probe.alpha_mag * probe.alpha_mag;
  return 2.0 * sh2 * sh2 +
         4.0 * a2 * (std::cosh(2.0 * probe.r) -
                     std::cos(2.0 * probe.tau + probe.phi) * sh2);
}

FisherReport fisher_report(const ProbeState& probe, double theta) {
  FisherReport rep;
  rep.fi = fisher_information(probe, theta);
  rep.qfi = qfi(probe);
  rep.theta = theta;
  if (rep.fi < 0.0 || rep.fi > rep.qfi + 1e-9) {
    throw std::logic_error("fisher_report: FI/QFI dominance violated");
  }
  return rep;
}

double average_fisher(const ProbeState& probe, const PhaseDistribution& prior) {
  if (!nearly_normalized(prior)) {
    throw std::invalid_argument("average_fisher: prior is not normalized");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < prior.n(); ++i) {
    acc += prior.weight(i) * prior.density[i] *
           fisher_information(probe, prior.theta(i));
  }
  return acc;
}

double van_trees_bound(const PhaseDistribution& prior, double avg_fi) {
  if (!(avg_fi >= 0.0)) throw std::invalid_argument("van_trees_bound: avg_fi < 0");
  if (!nearly_normalized(prior)) {
    throw std::invalid_argument("van_trees_bound: prior is not normalized");
  }
  const std::size_t n = prior.n();
  // Support region: contiguous run of representable density around the peak;
  // points that underflowed to zero at the far tails carry no mass.
  double dmax = 0.0;
  std::size_t peak = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (prior.density[i] > dmax) {
      dmax = prior.density[i];
      peak = i;
    }
  }
  if (!(dmax > 0.0)) throw std::domain_error("van_trees_bound: degenerate prior");
  std::size_t lo = peak, hi = peak;
  while (lo > 0 && prior.density[lo - 1] > 0.0) --lo;
  while (hi + 1 < n && prior.density[hi + 1] > 0.0) ++hi;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (!(prior.density[i] > 0.0)) {
      throw std::domain_error("van_trees_bound: zero density inside the support");
    }
  }
  if (hi - lo < 2) throw std::domain_error("van_trees_bound: degenerate prior");

  std::vector<double> logd(hi - lo + 1);
  for (std::size_t i = lo; i <= hi; ++i) logd[i - lo] = std::log(prior.density[i]);
  const double h = prior.h;
  double acc = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    std::size_t j = i - lo;
    double dld;
    if (i == lo) {
      dld = (-3.0 * logd[0] + 4.0 * logd[1] - logd[2]) / (2.0 * h);
    } else if (i == hi) {
      std::size_t m = logd.size() - 1;
      dld = (3.0 * logd[m] - 4.0 * logd[m - 1] + logd[m - 2]) / (2.0 * h);
    } else {
      dld = (logd[j + 1] - logd[j - 1]) / (2.0 * h);
    }
    acc += prior.weight(i) * prior.density[i] * dld * dld;
  }
  return 1.0 / (acc + avg_fi);
}

double quantum_van_trees(double sigma2_prior, double E) {
  if (!(sigma2_prior > 0.0)) {
    throw std::invalid_argument("quantum_van_trees: sigma2 must be positive");
  }
  if (!(E >= 0.0)) throw std::invalid_argument("quantum_van_trees: E must be >= 0");
  return 1.0 / (1.0 / sigma2_prior + 8.0 * E * (E + 1.0));
}

LocalSplit optimal_local_split(double E) {
  if (!(E >= 0.0)) throw std::invalid_argument("optimal_local_split: E must be >= 0");
  LocalSplit s;
  s.alpha2 = E * (E + 1.0) / (2.0 * E + 1.0);
  s.r = 0.5 * std::log(2.0 * E + 1.0);
  return s;
}

double lus_asymptotic_angle(double E) {
  if (!(E > 0.0)) throw std::invalid_argument("lus_asymptotic_angle: E must be > 0");
  return std::acos(std::tanh(2.0 * std::asinh(std::sqrt(E))));
}

}  // namespace gphase
