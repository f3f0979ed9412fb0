// Command line front end for the sub-Nyquist array receiver simulator:
//   subnyq simulate   one scenario, estimates printed against the truth
//   subnyq crb        bound tables for a drawn scenario
//   subnyq sweep      Monte Carlo sweep, CSV output
//
// Every flag can also live in a key=value config file passed via --config;
// command line values win.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "subnyq/crb.hpp"
#include "subnyq/harness.hpp"

using namespace subnyq;

namespace {

struct CliOptions {
  std::string geometry = "ula";
  int sensors = 8;
  double nyquist_hz = 10e9;
  int reduction = 8;
  int branches = 8;
  std::string pattern = "first";
  Eigen::Index snapshots = 1024;
  int sources = 3;
  std::vector<double> snr_db;
  std::string sweep = "snr";
  int trials = 200;
  std::uint64_t seed = 1;
  std::string algorithm = "both";
  std::string out;
  int threads = 0;
};

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) values.push_back(std::stod(item));
  }
  return values;
}

void add_common_options(CLI::App* cmd, CliOptions& opt) {
  cmd->set_config("--config", "", "key=value config file; flags override it");
  cmd->add_option("--geometry", opt.geometry,
                  "array layout: ula, mra, or comma-separated positions");
  cmd->add_option("--sensors", opt.sensors, "sensor count M");
  cmd->add_option("--nyquist-hz", opt.nyquist_hz, "Nyquist rate f_N in Hz");
  cmd->add_option("--reduction", opt.reduction, "sampling rate reduction factor L");
  cmd->add_option("--branches", opt.branches, "sampler branches per sensor P");
  cmd->add_option("--pattern", opt.pattern,
                  "coset pattern: first, random, or comma-separated offsets");
  cmd->add_option("--snapshots", opt.snapshots, "Nyquist-rate sample count T");
  cmd->add_option("--sources", opt.sources, "source count K");
  cmd->add_option("--snr-db", opt.snr_db, "per-source SNR values in dB")
      ->delimiter(',');
  cmd->add_option("--trials", opt.trials, "Monte Carlo trials per sweep value");
  cmd->add_option("--seed", opt.seed, "master seed");
  cmd->add_option("--algorithm", opt.algorithm, "jdftd, jdfsd, or both")
      ->check(CLI::IsMember({"jdftd", "jdfsd", "both"}));
  cmd->add_option("--out", opt.out, "output path (CSV for sweep)");
  cmd->add_option("--threads", opt.threads, "worker threads, 0 = hardware");
}

ExperimentConfig to_config(const CliOptions& opt) {
  ExperimentConfig cfg;
  if (opt.geometry == "ula") {
    cfg.geometry = GeometryKind::Ula;
    cfg.sensors = opt.sensors;
  } else if (opt.geometry == "mra") {
    cfg.geometry = GeometryKind::Mra;
    cfg.sensors = opt.sensors;
  } else {
    cfg.geometry = GeometryKind::Custom;
    cfg.custom_positions = parse_double_list(opt.geometry);
    cfg.sensors = static_cast<int>(cfg.custom_positions.size());
  }
  cfg.nyquist_hz = opt.nyquist_hz;
  cfg.reduction = opt.reduction;
  cfg.branches = opt.branches;
  if (opt.pattern == "first") {
    cfg.pattern = PatternPolicy::First;
  } else if (opt.pattern == "random") {
    cfg.pattern = PatternPolicy::Random;
  } else {
    cfg.pattern = PatternPolicy::Explicit;
    for (double c : parse_double_list(opt.pattern)) {
      cfg.explicit_cosets.push_back(static_cast<int>(c));
    }
    cfg.branches = static_cast<int>(cfg.explicit_cosets.size());
  }
  cfg.snapshots = opt.snapshots;
  cfg.sources = opt.sources;
  if (!opt.snr_db.empty()) cfg.snr_db = opt.snr_db;
  cfg.trials = opt.trials;
  cfg.seed = opt.seed;
  if (opt.algorithm == "jdftd") {
    cfg.algorithms = AlgorithmChoice::Jdftd;
  } else if (opt.algorithm == "jdfsd") {
    cfg.algorithms = AlgorithmChoice::Jdfsd;
  } else {
    cfg.algorithms = AlgorithmChoice::Both;
  }
  if (opt.sweep == "snr") {
    cfg.sweep = SweepKind::Snr;
  } else if (opt.sweep == "branches") {
    cfg.sweep = SweepKind::Branches;
  } else if (opt.sweep == "sources") {
    cfg.sweep = SweepKind::Sources;
  }
  cfg.threads = opt.threads;
  return cfg;
}

void warn_if_ambiguous(const ExperimentConfig& cfg) {
  if (cfg.pattern != PatternPolicy::Explicit && cfg.branches > 1) return;
  std::mt19937_64 rng(0);
  const auto pattern = make_pattern(cfg, cfg.branches, rng);
  if (!pattern.subband_identifiable()) {
    std::fprintf(stderr,
                 "warning: pattern cannot distinguish all sub-bands; "
                 "band identification will be ambiguous\n");
  }
}

int run_simulate(const CliOptions& opt) {
  ExperimentConfig cfg = to_config(opt);
  warn_if_ambiguous(cfg);
  const auto report = simulate_scenario(cfg);

  std::printf("pattern C = [");
  for (std::size_t i = 0; i < report.pattern.cosets().size(); ++i) {
    std::printf("%s%d", i ? "," : "", report.pattern.cosets()[i]);
  }
  std::printf("], average rate %.3g Hz, sigma^2 = %.3g\n",
              report.pattern.average_rate(cfg.nyquist_hz), report.sigma2);

  std::printf("%-8s %12s %14s %6s %12s\n", "truth", "theta[deg]", "f[Hz]", "band",
              "phi[rad]");
  for (std::size_t k = 0; k < report.truth.size(); ++k) {
    std::printf("  src %-2zu %12.4f %14.6e %6d %12.6f\n", k,
                report.truth[k].theta * 180.0 / kPi, report.truth[k].f,
                report.true_subbands[k], report.true_phis[k]);
  }

  for (const auto& result : report.results) {
    std::printf("%s%s (residual %.2e, iterations %d)\n", result.algorithm.c_str(),
                result.degraded ? " [degraded]" : "", result.residual,
                result.iterations);
    std::printf("%-8s %12s %14s %6s %12s %12s %12s\n", "est", "theta[deg]", "f[Hz]",
                "band", "phi[rad]", "d_theta[deg]", "d_f[Hz]");
    std::vector<double> est_f, true_f;
    for (const auto& s : result.sources) est_f.push_back(s.f_hat);
    for (const auto& s : report.truth) true_f.push_back(s.f);
    const auto perm = assign_by_frequency(est_f, true_f);
    for (std::size_t k = 0; k < result.sources.size(); ++k) {
      const auto& est = result.sources[static_cast<std::size_t>(perm[k])];
      std::printf("  src %-2zu %12.4f %14.6e %6d %12.6f %12.2e %12.4e\n", k,
                  est.theta_hat * 180.0 / kPi, est.f_hat, est.omega_hat, est.phi_hat,
                  (est.theta_hat - report.truth[k].theta) * 180.0 / kPi,
                  est.f_hat - report.truth[k].f);
    }
  }
  return 0;
}

int run_crb(const CliOptions& opt) {
  ExperimentConfig cfg = to_config(opt);
  warn_if_ambiguous(cfg);

  std::mt19937_64 rng(mix_seed({cfg.seed, 0, 0}));
  const ArrayGeometry geom = make_geometry(cfg);
  const SamplingPattern pattern = make_pattern(cfg, cfg.branches, rng);
  const SourceEnsemble ens =
      draw_sources(cfg.sources, cfg.nyquist_hz, cfg.reduction, rng);
  const double snr_db = cfg.snr_db.empty() ? 0.0 : cfg.snr_db.front();
  const double sigma2 = 1.0 / std::pow(10.0, snr_db / 10.0);

  CrbInputs in{geom,
               {},
               {},
               pattern,
               Eigen::MatrixXcd::Identity(cfg.sources, cfg.sources),
               sigma2,
               static_cast<double>(cfg.snapshots),
               cfg.nyquist_hz};
  for (int k = 0; k < ens.count(); ++k) {
    const Source& s = ens.sources()[static_cast<std::size_t>(k)];
    in.phis.push_back(spatial_phase(s.theta, s.f, cfg.nyquist_hz, cfg.spacing));
    in.omega.push_back(ens.subband(k));
  }

  const Eigen::MatrixXd sub = crb_sub_phase(in);
  const Eigen::MatrixXd ny = crb_ny_phase(in);
  const Eigen::VectorXd fsub = crb_frequency(in, FrequencyCrbMode::Sub);
  const Eigen::VectorXd fny = crb_frequency(in, FrequencyCrbMode::Nyquist);

  std::printf("M=%d L=%d P=%d T=%lld snr=%.1f dB sigma^2=%.4g\n", cfg.sensors,
              cfg.reduction, pattern.branches(),
              static_cast<long long>(cfg.snapshots), snr_db, sigma2);
  std::printf("single-source floor: %.6e rad^2\n",
              single_source_phase_floor(1.0 / sigma2, static_cast<double>(cfg.snapshots),
                                        cfg.sensors));
  std::printf("%-4s %10s %6s %14s %14s %14s %14s\n", "src", "phi[rad]", "band",
              "sub_phase", "ny_phase", "sub_freq", "ny_freq");
  for (int k = 0; k < ens.count(); ++k) {
    std::printf("%-4d %10.5f %6d %14.6e %14.6e %14.6e %14.6e\n", k, in.phis[k],
                in.omega[k], sub(k, k), ny(k, k), fsub(k), fny(k));
  }
  return 0;
}

int run_sweep_cmd(const CliOptions& opt) {
  ExperimentConfig cfg = to_config(opt);
  warn_if_ambiguous(cfg);
  const SweepResult result = run_sweep(cfg);
  if (opt.out.empty()) {
    write_csv(result, std::cout);
  } else {
    std::ofstream file(opt.out, std::ios::binary);
    if (!file) {
      std::fprintf(stderr, "error: cannot open %s\n", opt.out.c_str());
      return 1;
    }
    write_csv(result, file);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sub-Nyquist array receiver simulator"};
  app.require_subcommand(1);

  CliOptions sim_opt, crb_opt, sweep_opt;

  CLI::App* sim = app.add_subcommand("simulate", "run one scenario and print estimates");
  add_common_options(sim, sim_opt);

  CLI::App* crb = app.add_subcommand("crb", "print estimation bound tables");
  add_common_options(crb, crb_opt);

  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo sweep, CSV output");
  add_common_options(sweep, sweep_opt);
  sweep->add_option("--sweep", sweep_opt.sweep, "sweep kind: snr, branches, sources")
      ->check(CLI::IsMember({"snr", "branches", "sources"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(sim_opt);
    if (crb->parsed()) return run_crb(crb_opt);
    if (sweep->parsed()) return run_sweep_cmd(sweep_opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
