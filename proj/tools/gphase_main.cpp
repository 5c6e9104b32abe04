#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gphase/bayes.hpp"
#include "gphase/distribution.hpp"
#include "gphase/fisher.hpp"
#include "gphase/math_util.hpp"
#include "gphase/optimizer.hpp"
#include "gphase/probe.hpp"
#include "gphase/random.hpp"
#include "gphase/simulator.hpp"
#include "gphase/version.hpp"

namespace {

using nlohmann::json;
using namespace gphase;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBoundViolation = 2;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt3(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// One CSV output: '#' comment header (version, config echo, seed, grids,
// optional duration), column-name row, data rows.
struct CsvDoc {
  std::string command;
  json config = json::object();
  std::string seed = "none";
  std::string grids;
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void write(const std::string& path, bool omit_timing, double duration_s) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << "# gphase " << kVersion << "\n";
    f << "# command: " << command << "\n";
    f << "# config: " << config.dump() << "\n";
    f << "# seed: " << seed << "\n";
    f << "# grids: " << grids << "\n";
    if (!omit_timing) f << "# duration_s: " << fmt3(duration_s) << "\n";
    for (const std::string& c : comments) f << "# " << c << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
      f << (i ? "," : "") << columns[i];
    }
    f << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        f << (i ? "," : "") << row[i];
      }
      f << "\n";
    }
    if (!f) throw std::runtime_error("write failed: " + path);
  }
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json cfg = json::parse(in);
  if (!cfg.is_object()) throw std::runtime_error("config must be a JSON object");
  if (cfg.contains("schema_version") &&
      cfg.at("schema_version").get<int>() != kConfigSchemaVersion) {
    throw std::runtime_error("unsupported config schema_version");
  }
  return cfg;
}

// Precedence: explicit command-line flag > config file value > default.
template <typename T>
void override_from(const json& cfg, const CLI::App* sub, const char* flag,
                   const char* key, T& target) {
  if (!cfg.contains(key) || sub->count(flag) > 0) return;
  cfg.at(key).get_to(target);
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) {
    throw std::invalid_argument("log_spaced: need 0 < lo < hi and n >= 2");
  }
  std::vector<double> out(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

const char* family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::HUS: return "hus";
    case FamilyKind::LUS: return "lus";
    case FamilyKind::FULL: return "full";
  }
  return "unknown";
}

// --- fi ---------------------------------------------------------------

struct FiArgs {
  double E = 2.0;
  double theta_est = 0.5 * kPi;
  double diff_min = -1.2;
  double diff_max = 1.2;
  double diff_step = 0.005;
  std::string out = "fi.csv";
};

int run_fi(const FiArgs& a, bool omit_timing) {
  if (!(a.E > 0.0)) throw std::invalid_argument("fi: E must be positive");
  if (!(a.diff_step > 0.0) || !(a.diff_max > a.diff_min)) {
    throw std::invalid_argument("fi: need diff_min < diff_max and diff_step > 0");
  }
  Timer timer;
  const auto n = static_cast<std::size_t>(
      std::floor((a.diff_max - a.diff_min) / a.diff_step + 1.0 + 1e-9));
  LocalSplit split = optimal_local_split(a.E);
  ProbeState hus = hus_probe(a.E, split.alpha2, a.theta_est);
  ProbeState lus = lus_probe(a.E, -lus_asymptotic_angle(a.E), a.theta_est);

  CsvDoc doc;
  doc.command = "fi";
  doc.config = {{"E", a.E},         {"theta_est", a.theta_est},
                {"diff_min", a.diff_min}, {"diff_max", a.diff_max},
                {"diff_step", a.diff_step}};
  doc.grids = "diff_grid=" + std::to_string(n);
  doc.columns = {"theta_diff", "fi_hus_optimal", "fi_lus_optimal"};
  for (std::size_t i = 0; i < n; ++i) {
    double d = a.diff_min + static_cast<double>(i) * a.diff_step;
    double theta = a.theta_est - d;
    doc.rows.push_back({fmt(d), fmt(fisher_information(hus, theta)),
                        fmt(fisher_information(lus, theta))});
  }
  doc.write(a.out, omit_timing, timer.seconds());
  return kExitOk;
}

// --- qfi --------------------------------------------------------------

struct QfiArgs {
  double alpha_mag = 0.0;
  double tau = 0.0;
  double r = 0.0;
  double phi = 0.0;
  double theta = 0.0;
  std::string out = "qfi.csv";
};

int run_qfi(const QfiArgs& a, bool omit_timing) {
  Timer timer;
  ProbeState probe(a.alpha_mag, a.tau, a.r, a.phi);
  FisherReport report = fisher_report(probe, a.theta);

  CsvDoc doc;
  doc.command = "qfi";
  doc.config = {{"alpha_mag", a.alpha_mag}, {"tau", a.tau},   {"r", a.r},
                {"phi", a.phi},             {"theta", a.theta}};
  doc.grids = "none";
  doc.columns = {"alpha_mag", "tau", "r", "phi", "energy", "theta", "fi", "qfi"};
  doc.rows.push_back({fmt(probe.alpha_mag), fmt(probe.tau), fmt(probe.r),
                      fmt(probe.phi), fmt(energy(probe)), fmt(report.theta),
                      fmt(report.fi), fmt(report.qfi)});
  doc.write(a.out, omit_timing, timer.seconds());
  return kExitOk;
}

// --- apv --------------------------------------------------------------

struct ApvArgs {
  double alpha_mag = 0.0;
  double tau = 0.0;
  double r = 0.0;
  double phi = 0.0;
  double sigma2 = 0.1;
  double prior_mean = 0.5 * kPi;
  std::size_t n_grid = kDefaultThetaGridSize;
  std::size_t n_q = 801;
  std::size_t mc = 0;
  std::uint64_t seed = 12345;
  std::string batch;
  std::string out = "apv.csv";
};

struct ApvJob {
  ProbeState probe;
  double sigma2 = 0.0;
  double prior_mean = 0.0;
  std::size_t mc = 0;
};

int run_apv(const ApvArgs& a, bool omit_timing) {
  Timer timer;
  std::vector<ApvJob> jobs;
  if (!a.batch.empty()) {
    std::ifstream in(a.batch);
    if (!in) throw std::runtime_error("cannot open batch file: " + a.batch);
    json spec = json::parse(in);
    const json& list = spec.is_object() && spec.contains("probes")
                           ? spec.at("probes")
                           : spec;
    if (!list.is_array()) {
      throw std::runtime_error("batch file must hold an array of probes");
    }
    for (const json& item : list) {
      ApvJob job;
      job.probe = ProbeState(item.at("alpha_mag").get<double>(),
                             item.at("tau").get<double>(),
                             item.at("r").get<double>(),
                             item.at("phi").get<double>());
      job.sigma2 = item.at("sigma2").get<double>();
      job.prior_mean = item.value("prior_mean", a.prior_mean);
      job.mc = item.value("mc", a.mc);
      jobs.push_back(job);
    }
  } else {
    jobs.push_back({ProbeState(a.alpha_mag, a.tau, a.r, a.phi), a.sigma2,
                    a.prior_mean, a.mc});
  }

  QuadratureSpec quad;
  quad.n_q = a.n_q;
  RandomStream master(a.seed);
  bool any_mc = false;
  bool violated = false;

  CsvDoc doc;
  doc.command = "apv";
  doc.config = {{"prior_mean", a.prior_mean}, {"n_grid", a.n_grid},
                {"n_q", a.n_q},               {"mc", a.mc},
                {"n_probes", jobs.size()}};
  if (a.batch.empty()) {
    doc.config["alpha_mag"] = a.alpha_mag;
    doc.config["tau"] = a.tau;
    doc.config["r"] = a.r;
    doc.config["phi"] = a.phi;
    doc.config["sigma2"] = a.sigma2;
  }
  doc.grids = "theta_grid=" + std::to_string(a.n_grid) +
              " q_grid=" + std::to_string(a.n_q);
  doc.columns = {"idx",     "alpha_mag", "tau",
                 "r",       "phi",       "sigma2",
                 "apv",     "posterior_mean_var", "prior_var",
                 "excluded_mass", "qvt_bound", "mc_estimate",
                 "mc_se"};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const ApvJob& job = jobs[i];
    PhaseDistribution prior = gaussian_prior(job.prior_mean, job.sigma2, a.n_grid);
    ApvResult res = apv(job.probe, prior, quad);
    double qvt = quantum_van_trees(res.prior_variance, energy(job.probe));
    if (res.apv < qvt - 1e-9 || res.apv > res.prior_variance + 1e-9) {
      violated = true;
    }
    double mc_estimate = std::nan("");
    double mc_se = std::nan("");
    if (job.mc > 0) {
      any_mc = true;
      RandomStream rng = master.child(i);
      MonteCarloEstimate est = apv_monte_carlo(job.probe, prior, job.mc, rng);
      mc_estimate = est.estimate;
      mc_se = est.std_error;
    }
    doc.rows.push_back({std::to_string(i), fmt(job.probe.alpha_mag),
                        fmt(job.probe.tau), fmt(job.probe.r),
                        fmt(job.probe.phi), fmt(job.sigma2), fmt(res.apv),
                        fmt(res.posterior_mean_variance),
                        fmt(res.prior_variance), fmt(res.excluded_mass),
                        fmt(qvt), fmt(mc_estimate), fmt(mc_se)});
  }
  doc.seed = any_mc ? std::to_string(a.seed) : "none";
  doc.write(a.out, omit_timing, timer.seconds());
  return violated ? kExitBoundViolation : kExitOk;
}

// --- optimize ---------------------------------------------------------

struct OptimizeArgs {
  double E = 2.0;
  double sigma2 = 0.1;
  double prior_mean = 0.5 * kPi;
  std::string family = "full";
  std::size_t n_grid = kDefaultThetaGridSize;
  std::string out = "optimize.csv";
};

int run_optimize(const OptimizeArgs& a, bool omit_timing) {
  Timer timer;
  PhaseDistribution prior = gaussian_prior(a.prior_mean, a.sigma2, a.n_grid);
  std::vector<Optimum> optima;
  if (a.family == "hus") {
    optima.push_back(optimize_hus(a.E, prior));
  } else if (a.family == "lus") {
    optima.push_back(optimize_lus(a.E, prior));
  } else if (a.family == "full") {
    optima = optimize_full(a.E, prior, default_starts(a.E, a.prior_mean));
  } else {
    throw std::invalid_argument("optimize: family must be hus, lus or full");
  }
  if (optima.empty()) throw std::runtime_error("optimize: no minima found");

  CsvDoc doc;
  doc.command = "optimize";
  doc.config = {{"E", a.E},
                {"sigma2", a.sigma2},
                {"prior_mean", a.prior_mean},
                {"family", a.family},
                {"n_grid", a.n_grid}};
  doc.grids = "theta_grid=" + std::to_string(a.n_grid);
  doc.columns = {"family",     "alpha_mag", "alpha2_over_E",
                 "tau",        "r",         "phi",
                 "apv",        "apv_over_sigma2", "converged",
                 "low_confidence", "start_alpha_mag", "start_tau",
                 "start_phi"};
  for (const Optimum& opt : optima) {
    double a2 = opt.probe.alpha_mag * opt.probe.alpha_mag;
    doc.rows.push_back({family_name(opt.family.kind), fmt(opt.probe.alpha_mag),
                        fmt(a.E > 0.0 ? a2 / a.E : 0.0), fmt(opt.probe.tau),
                        fmt(opt.probe.r), fmt(opt.probe.phi), fmt(opt.apv),
                        fmt(opt.apv / a.sigma2), opt.converged ? "1" : "0",
                        opt.low_confidence ? "1" : "0", fmt(opt.start[0]),
                        fmt(opt.start[1]), fmt(opt.start[2])});
  }
  doc.write(a.out, omit_timing, timer.seconds());
  return kExitOk;
}

// --- sweep ------------------------------------------------------------

struct SweepArgs {
  double E = 2.0;
  std::string family = "hus";
  double sigma2_min = 0.001;
  double sigma2_max = kMaxPriorSigma2;
  std::size_t n_points = 25;
  std::vector<double> sigma2_list;
  double fixed_ratio = -1.0;
  std::size_t n_grid = kDefaultThetaGridSize;
  std::string out = "sweep.csv";
};

int run_sweep(const SweepArgs& a, bool omit_timing) {
  Timer timer;
  std::vector<double> sigma2 =
      a.sigma2_list.empty() ? log_spaced(a.sigma2_min, a.sigma2_max, a.n_points)
                            : a.sigma2_list;
  FamilySpec family;
  family.E = a.E;
  if (a.family == "hus") {
    family.kind = FamilyKind::HUS;
  } else if (a.family == "lus") {
    family.kind = FamilyKind::LUS;
  } else if (a.family == "full") {
    family.kind = FamilyKind::FULL;
  } else {
    throw std::invalid_argument("sweep: family must be hus, lus or full");
  }
  if (a.fixed_ratio >= 0.0 && family.kind != FamilyKind::HUS) {
    throw std::invalid_argument("sweep: --fixed-ratio applies to the hus family");
  }

  double asymptote = family.kind == FamilyKind::LUS
                         ? lus_asymptotic_angle(a.E)
                         : (a.E + 1.0) / (2.0 * a.E + 1.0);

  CsvDoc doc;
  doc.command = "sweep";
  doc.config = {{"E", a.E},
                {"family", a.family},
                {"n_grid", a.n_grid},
                {"sigma2_values", sigma2}};
  if (a.fixed_ratio >= 0.0) doc.config["fixed_ratio"] = a.fixed_ratio;
  doc.grids = "theta_grid=" + std::to_string(a.n_grid) +
              " sigma2_grid=" + std::to_string(sigma2.size());
  doc.columns = {"sigma2", "alpha2_over_E", "tau",      "phi",
                 "apv",    "apv_over_sigma2", "asymptote"};

  bool any_failed = false;
  if (a.fixed_ratio >= 0.0) {
    if (a.fixed_ratio > 1.0) {
      throw std::invalid_argument("sweep: fixed_ratio must lie in [0, 1]");
    }
    for (double s2 : sigma2) {
      PhaseDistribution prior = gaussian_prior(0.5 * kPi, s2, a.n_grid);
      ProbeState probe = hus_probe(a.E, a.fixed_ratio * a.E, 0.5 * kPi);
      ApvResult res = apv(probe, prior);
      doc.rows.push_back({fmt(s2), fmt(a.fixed_ratio), fmt(probe.tau),
                          fmt(probe.phi), fmt(res.apv), fmt(res.apv / s2),
                          fmt(asymptote)});
    }
  } else {
    std::vector<SweepRow> rows = sweep(a.E, sigma2, family, a.n_grid);
    for (const SweepRow& row : rows) {
      if (!row.ok) {
        any_failed = true;
        doc.comments.push_back("skipped sigma2=" + fmt(row.sigma2) + ": " +
                               row.note);
        continue;
      }
      doc.rows.push_back({fmt(row.sigma2), fmt(row.alpha2_over_E), fmt(row.tau),
                          fmt(row.phi), fmt(row.apv), fmt(row.apv_over_sigma2),
                          fmt(asymptote)});
    }
  }
  doc.write(a.out, omit_timing, timer.seconds());
  return any_failed ? kExitError : kExitOk;
}

// --- simulate ---------------------------------------------------------

struct SimulateArgs {
  double E = 2.0;
  double sigma2 = kMaxPriorSigma2;
  std::size_t n_traj = 1000;
  std::size_t n_rounds = 20;
  std::uint64_t seed = 20260822;
  std::string tier = "all";
  std::size_t n_grid = kDefaultThetaGridSize;
  bool full_search = false;
  std::string out_dir = ".";
  std::string prefix = "sim";
};

int run_simulate(const SimulateArgs& a, bool omit_timing) {
  std::vector<Tier> tiers;
  if (a.tier == "all") {
    tiers = {Tier::FixedLocal,          Tier::FixedBayes,
             Tier::AngleAdaptiveLocal,  Tier::AngleAdaptiveBayes,
             Tier::Predetermined,       Tier::FullyAdaptive};
  } else {
    auto t = tier_from_name(a.tier);
    if (!t) throw std::invalid_argument("simulate: unknown tier " + a.tier);
    tiers = {*t};
  }
  Timer total;
  PhaseDistribution prior = gaussian_prior(0.5 * kPi, a.sigma2, a.n_grid);

  json base_config = {{"E", a.E},           {"sigma2", a.sigma2},
                      {"n_traj", a.n_traj}, {"n_rounds", a.n_rounds},
                      {"n_grid", a.n_grid}, {"full_search", a.full_search}};
  std::string grids = "theta_grid=" + std::to_string(a.n_grid);

  CsvDoc combined;
  combined.command = "simulate";
  combined.config = base_config;
  combined.config["tier"] = a.tier;
  combined.seed = std::to_string(a.seed);
  combined.grids = grids;
  combined.columns = {"tier", "final_mean_apv", "final_std_err", "aborted"};

  for (Tier tier : tiers) {
    Timer timer;
    StrategySpec spec;
    spec.tier = tier;
    spec.E = a.E;
    spec.full_search_per_round = a.full_search;
    EnsembleResult res = run_ensemble(spec, prior, a.n_traj, a.n_rounds, a.seed);

    CsvDoc doc;
    doc.command = "simulate";
    doc.config = base_config;
    doc.config["tier"] = tier_name(tier);
    doc.seed = std::to_string(a.seed);
    doc.grids = grids;
    doc.columns = {"round", "mean_apv", "std_err", "mean_apv_times_Nplus1",
                   "aborted"};
    for (std::size_t k = 0; k < res.mean_apv.size(); ++k) {
      doc.rows.push_back({std::to_string(k + 1), fmt(res.mean_apv[k]),
                          fmt(res.std_err[k]),
                          fmt(res.mean_apv[k] * static_cast<double>(k + 2)),
                          std::to_string(res.aborted)});
    }
    doc.write(a.out_dir + "/" + a.prefix + "_" + tier_name(tier) + ".csv",
              omit_timing, timer.seconds());
    combined.rows.push_back({tier_name(tier), fmt(res.mean_apv.back()),
                             fmt(res.std_err.back()),
                             std::to_string(res.aborted)});
  }
  combined.write(a.out_dir + "/" + a.prefix + "_combined.csv", omit_timing,
                 total.seconds());
  return kExitOk;
}

// --- bounds -----------------------------------------------------------

struct BoundsArgs {
  std::vector<double> E_list = {0.0, 0.5, 1.0, 2.0, 5.0};
  double sigma2_min = 0.001;
  double sigma2_max = kMaxPriorSigma2;
  std::size_t n_points = 25;
  std::vector<double> sigma2_list;
  bool with_probe = false;
  double alpha_mag = 0.0;
  double tau = 0.0;
  double r = 0.0;
  double phi = 0.0;
  std::size_t n_grid = kDefaultThetaGridSize;
  std::string out = "bounds.csv";
};

int run_bounds(const BoundsArgs& a, bool omit_timing) {
  Timer timer;
  std::vector<double> sigma2 =
      a.sigma2_list.empty() ? log_spaced(a.sigma2_min, a.sigma2_max, a.n_points)
                            : a.sigma2_list;
  bool violated = false;

  CsvDoc doc;
  doc.command = "bounds";
  doc.config = {{"sigma2_values", sigma2}, {"n_grid", a.n_grid}};
  doc.grids = "theta_grid=" + std::to_string(a.n_grid) +
              " sigma2_grid=" + std::to_string(sigma2.size());

  if (a.with_probe) {
    ProbeState probe(a.alpha_mag, a.tau, a.r, a.phi);
    double E = energy(probe);
    doc.config["alpha_mag"] = a.alpha_mag;
    doc.config["tau"] = a.tau;
    doc.config["r"] = a.r;
    doc.config["phi"] = a.phi;
    doc.columns = {"sigma2",    "E",         "qvt_bound", "avg_fi",
                   "van_trees_bound", "apv"};
    for (double s2 : sigma2) {
      PhaseDistribution prior = gaussian_prior(0.5 * kPi, s2, a.n_grid);
      ApvResult res = apv(probe, prior);
      double avg_fi = average_fisher(probe, prior);
      double vt = van_trees_bound(prior, avg_fi);
      double qvt = quantum_van_trees(res.prior_variance, E);
      if (res.apv < vt - 1e-9 || res.apv < qvt - 1e-9) violated = true;
      doc.rows.push_back({fmt(s2), fmt(E), fmt(qvt), fmt(avg_fi), fmt(vt),
                          fmt(res.apv)});
    }
  } else {
    doc.config["E_values"] = a.E_list;
    doc.columns = {"sigma2", "E", "qvt_bound"};
    for (double E : a.E_list) {
      if (E < 0.0) throw std::invalid_argument("bounds: E must be >= 0");
      for (double s2 : sigma2) {
        doc.rows.push_back({fmt(s2), fmt(E), fmt(quantum_van_trees(s2, E))});
      }
    }
  }
  doc.write(a.out, omit_timing, timer.seconds());
  return violated ? kExitBoundViolation : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-probe homodyne phase estimation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  bool omit_timing = false;
  std::string config_path;

  FiArgs fi_args;
  CLI::App* fi = app.add_subcommand(
      "fi", "Fisher information vs estimate-minus-true phase difference");
  fi->add_option("--E", fi_args.E, "energy budget");
  fi->add_option("--theta-est", fi_args.theta_est, "phase estimate");
  fi->add_option("--diff-min", fi_args.diff_min, "smallest theta difference");
  fi->add_option("--diff-max", fi_args.diff_max, "largest theta difference");
  fi->add_option("--diff-step", fi_args.diff_step, "difference grid step");
  fi->add_option("--out", fi_args.out, "output CSV path");

  QfiArgs qfi_args;
  CLI::App* qfi_cmd = app.add_subcommand(
      "qfi", "classical and quantum Fisher information of one probe");
  qfi_cmd->add_option("--alpha-mag", qfi_args.alpha_mag, "displacement magnitude");
  qfi_cmd->add_option("--tau", qfi_args.tau, "displacement angle");
  qfi_cmd->add_option("--r", qfi_args.r, "squeezing strength");
  qfi_cmd->add_option("--phi", qfi_args.phi, "squeezing angle");
  qfi_cmd->add_option("--theta", qfi_args.theta, "evaluation phase");
  qfi_cmd->add_option("--out", qfi_args.out, "output CSV path");

  ApvArgs apv_args;
  CLI::App* apv_cmd = app.add_subcommand(
      "apv", "average posterior variance of a probe against a Gaussian prior");
  apv_cmd->add_option("--alpha-mag", apv_args.alpha_mag, "displacement magnitude");
  apv_cmd->add_option("--tau", apv_args.tau, "displacement angle");
  apv_cmd->add_option("--r", apv_args.r, "squeezing strength");
  apv_cmd->add_option("--phi", apv_args.phi, "squeezing angle");
  apv_cmd->add_option("--sigma2", apv_args.sigma2, "prior variance");
  apv_cmd->add_option("--prior-mean", apv_args.prior_mean, "prior mean");
  apv_cmd->add_option("--n-grid", apv_args.n_grid, "phase grid size");
  apv_cmd->add_option("--n-q", apv_args.n_q, "outcome grid size");
  apv_cmd->add_option("--mc", apv_args.mc,
                      "Monte Carlo sample count (0 disables)");
  apv_cmd->add_option("--seed", apv_args.seed, "Monte Carlo seed");
  apv_cmd->add_option("--batch", apv_args.batch,
                      "JSON file with an array of probe/prior rows");
  apv_cmd->add_option("--out", apv_args.out, "output CSV path");

  OptimizeArgs opt_args;
  CLI::App* opt_cmd = app.add_subcommand(
      "optimize", "probe-family optimization for one prior");
  opt_cmd->add_option("--E", opt_args.E, "energy budget");
  opt_cmd->add_option("--sigma2", opt_args.sigma2, "prior variance");
  opt_cmd->add_option("--prior-mean", opt_args.prior_mean, "prior mean");
  opt_cmd->add_option("--family", opt_args.family, "hus, lus or full");
  opt_cmd->add_option("--n-grid", opt_args.n_grid, "phase grid size");
  opt_cmd->add_option("--out", opt_args.out, "output CSV path");

  SweepArgs sweep_args;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "family optimization across prior variances");
  sweep_cmd->add_option("--E", sweep_args.E, "energy budget");
  sweep_cmd->add_option("--family", sweep_args.family, "hus, lus or full");
  sweep_cmd->add_option("--sigma2-min", sweep_args.sigma2_min,
                        "smallest prior variance");
  sweep_cmd->add_option("--sigma2-max", sweep_args.sigma2_max,
                        "largest prior variance");
  sweep_cmd->add_option("--n-points", sweep_args.n_points,
                        "log-spaced variance count");
  sweep_cmd->add_option("--sigma2-list", sweep_args.sigma2_list,
                        "explicit variance list (overrides the range)");
  sweep_cmd->add_option("--fixed-ratio", sweep_args.fixed_ratio,
                        "hold alpha^2/E fixed instead of optimizing");
  sweep_cmd->add_option("--n-grid", sweep_args.n_grid, "phase grid size");
  sweep_cmd->add_option("--out", sweep_args.out, "output CSV path");

  SimulateArgs sim_args;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "repeated-measurement strategy ensembles");
  sim_cmd->add_option("--E", sim_args.E, "energy budget");
  sim_cmd->add_option("--sigma2", sim_args.sigma2, "initial prior variance");
  sim_cmd->add_option("--n-traj", sim_args.n_traj, "trajectory count");
  sim_cmd->add_option("--n-rounds", sim_args.n_rounds, "rounds per trajectory");
  sim_cmd->add_option("--seed", sim_args.seed, "ensemble seed");
  sim_cmd->add_option("--tier", sim_args.tier,
                      "strategy tier name, or all");
  sim_cmd->add_option("--n-grid", sim_args.n_grid, "phase grid size");
  sim_cmd->add_flag("--full-search", sim_args.full_search,
                    "rerun the full probe search every round (fully_adaptive)");
  sim_cmd->add_option("--out-dir", sim_args.out_dir, "output directory");
  sim_cmd->add_option("--prefix", sim_args.prefix, "output file prefix");

  BoundsArgs bounds_args;
  CLI::App* bounds_cmd = app.add_subcommand(
      "bounds", "Van Trees and quantum Van Trees lower bounds");
  bounds_cmd->add_option("--E-list", bounds_args.E_list, "energy budgets");
  bounds_cmd->add_option("--sigma2-min", bounds_args.sigma2_min,
                         "smallest prior variance");
  bounds_cmd->add_option("--sigma2-max", bounds_args.sigma2_max,
                         "largest prior variance");
  bounds_cmd->add_option("--n-points", bounds_args.n_points,
                         "log-spaced variance count");
  bounds_cmd->add_option("--sigma2-list", bounds_args.sigma2_list,
                         "explicit variance list (overrides the range)");
  bounds_cmd->add_flag("--with-probe", bounds_args.with_probe,
                       "also evaluate avg FI, Van Trees and apv for one probe");
  bounds_cmd->add_option("--alpha-mag", bounds_args.alpha_mag,
                         "displacement magnitude");
  bounds_cmd->add_option("--tau", bounds_args.tau, "displacement angle");
  bounds_cmd->add_option("--r", bounds_args.r, "squeezing strength");
  bounds_cmd->add_option("--phi", bounds_args.phi, "squeezing angle");
  bounds_cmd->add_option("--n-grid", bounds_args.n_grid, "phase grid size");
  bounds_cmd->add_option("--out", bounds_args.out, "output CSV path");

  for (CLI::App* sub : {fi, qfi_cmd, apv_cmd, opt_cmd, sweep_cmd, sim_cmd,
                        bounds_cmd}) {
    sub->add_flag("--omit-timing", omit_timing,
                  "drop the wall-clock line from output headers");
    sub->add_option("--config", config_path,
                    "JSON config file; explicit flags take precedence");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    json cfg = load_config(config_path);
    if (fi->parsed()) {
      override_from(cfg, fi, "--E", "E", fi_args.E);
      override_from(cfg, fi, "--theta-est", "theta_est", fi_args.theta_est);
      override_from(cfg, fi, "--diff-min", "diff_min", fi_args.diff_min);
      override_from(cfg, fi, "--diff-max", "diff_max", fi_args.diff_max);
      override_from(cfg, fi, "--diff-step", "diff_step", fi_args.diff_step);
      override_from(cfg, fi, "--out", "out", fi_args.out);
      return run_fi(fi_args, omit_timing);
    }
    if (qfi_cmd->parsed()) {
      override_from(cfg, qfi_cmd, "--alpha-mag", "alpha_mag", qfi_args.alpha_mag);
      override_from(cfg, qfi_cmd, "--tau", "tau", qfi_args.tau);
      override_from(cfg, qfi_cmd, "--r", "r", qfi_args.r);
      override_from(cfg, qfi_cmd, "--phi", "phi", qfi_args.phi);
      override_from(cfg, qfi_cmd, "--theta", "theta", qfi_args.theta);
      override_from(cfg, qfi_cmd, "--out", "out", qfi_args.out);
      return run_qfi(qfi_args, omit_timing);
    }
    if (apv_cmd->parsed()) {
      override_from(cfg, apv_cmd, "--alpha-mag", "alpha_mag", apv_args.alpha_mag);
      override_from(cfg, apv_cmd, "--tau", "tau", apv_args.tau);
      override_from(cfg, apv_cmd, "--r", "r", apv_args.r);
      override_from(cfg, apv_cmd, "--phi", "phi", apv_args.phi);
      override_from(cfg, apv_cmd, "--sigma2", "sigma2", apv_args.sigma2);
      override_from(cfg, apv_cmd, "--prior-mean", "prior_mean",
                    apv_args.prior_mean);
      override_from(cfg, apv_cmd, "--n-grid", "n_grid", apv_args.n_grid);
      override_from(cfg, apv_cmd, "--n-q", "n_q", apv_args.n_q);
      override_from(cfg, apv_cmd, "--mc", "mc", apv_args.mc);
      override_from(cfg, apv_cmd, "--seed", "seed", apv_args.seed);
      override_from(cfg, apv_cmd, "--batch", "batch", apv_args.batch);
      override_from(cfg, apv_cmd, "--out", "out", apv_args.out);
      return run_apv(apv_args, omit_timing);
    }
    if (opt_cmd->parsed()) {
      override_from(cfg, opt_cmd, "--E", "E", opt_args.E);
      override_from(cfg, opt_cmd, "--sigma2", "sigma2", opt_args.sigma2);
      override_from(cfg, opt_cmd, "--prior-mean", "prior_mean",
                    opt_args.prior_mean);
      override_from(cfg, opt_cmd, "--family", "family", opt_args.family);
      override_from(cfg, opt_cmd, "--n-grid", "n_grid", opt_args.n_grid);
      override_from(cfg, opt_cmd, "--out", "out", opt_args.out);
      return run_optimize(opt_args, omit_timing);
    }
    if (sweep_cmd->parsed()) {
      override_from(cfg, sweep_cmd, "--E", "E", sweep_args.E);
      override_from(cfg, sweep_cmd, "--family", "family", sweep_args.family);
      override_from(cfg, sweep_cmd, "--sigma2-min", "sigma2_min",
                    sweep_args.sigma2_min);
      override_from(cfg, sweep_cmd, "--sigma2-max", "sigma2_max",
                    sweep_args.sigma2_max);
      override_from(cfg, sweep_cmd, "--n-points", "n_points",
                    sweep_args.n_points);
      override_from(cfg, sweep_cmd, "--sigma2-list", "sigma2_list",
                    sweep_args.sigma2_list);
      override_from(cfg, sweep_cmd, "--fixed-ratio", "fixed_ratio",
                    sweep_args.fixed_ratio);
      override_from(cfg, sweep_cmd, "--n-grid", "n_grid", sweep_args.n_grid);
      override_from(cfg, sweep_cmd, "--out", "out", sweep_args.out);
      return run_sweep(sweep_args, omit_timing);
    }
    if (sim_cmd->parsed()) {
      override_from(cfg, sim_cmd, "--E", "E", sim_args.E);
      override_from(cfg, sim_cmd, "--sigma2", "sigma2", sim_args.sigma2);
      override_from(cfg, sim_cmd, "--n-traj", "n_traj", sim_args.n_traj);
      override_from(cfg, sim_cmd, "--n-rounds", "n_rounds", sim_args.n_rounds);
      override_from(cfg, sim_cmd, "--seed", "seed", sim_args.seed);
      override_from(cfg, sim_cmd, "--tier", "tier", sim_args.tier);
      override_from(cfg, sim_cmd, "--n-grid", "n_grid", sim_args.n_grid);
      override_from(cfg, sim_cmd, "--full-search", "full_search",
                    sim_args.full_search);
      override_from(cfg, sim_cmd, "--out-dir", "out_dir", sim_args.out_dir);
      override_from(cfg, sim_cmd, "--prefix", "prefix", sim_args.prefix);
      return run_simulate(sim_args, omit_timing);
    }
    if (bounds_cmd->parsed()) {
      override_from(cfg, bounds_cmd, "--E-list", "E_values", bounds_args.E_list);
      override_from(cfg, bounds_cmd, "--sigma2-min", "sigma2_min",
                    bounds_args.sigma2_min);
      override_from(cfg, bounds_cmd, "--sigma2-max", "sigma2_max",
                    bounds_args.sigma2_max);
      override_from(cfg, bounds_cmd, "--n-points", "n_points",
                    bounds_args.n_points);
      override_from(cfg, bounds_cmd, "--sigma2-list", "sigma2_list",
                    bounds_args.sigma2_list);
      override_from(cfg, bounds_cmd, "--with-probe", "with_probe",
                    bounds_args.with_probe);
      override_from(cfg, bounds_cmd, "--alpha-mag", "alpha_mag",
                    bounds_args.alpha_mag);
      override_from(cfg, bounds_cmd, "--tau", "tau", bounds_args.tau);
      override_from(cfg, bounds_cmd, "--r", "r", bounds_args.r);
      override_from(cfg, bounds_cmd, "--phi", "phi", bounds_args.phi);
      override_from(cfg, bounds_cmd, "--n-grid", "n_grid", bounds_args.n_grid);
      override_from(cfg, bounds_cmd, "--out", "out", bounds_args.out);
      return run_bounds(bounds_args, omit_timing);
    }
    std::fprintf(stderr, "error: no subcommand selected\n");
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
}
