#include "subnyq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace subnyq {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

double rmse(const std::vector<std::vector<double>>& estimates,
            const std::vector<std::vector<double>>& truths) {
  if (estimates.size() != truths.size()) {
    throw std::invalid_argument("rmse: trial count mismatch");
  }
  double sum = 0.0;
  std::size_t terms = 0;
  for (std::size_t t = 0; t < estimates.size(); ++t) {
    if (estimates[t].size() != truths[t].size()) {
      throw std::invalid_argument("rmse: source count mismatch in trial " +
                                  std::to_string(t));
    }
    for (std::size_t k = 0; k < estimates[t].size(); ++k) {
      const double e = estimates[t][k] - truths[t][k];
      sum += e * e;
      ++terms;
    }
  }
  if (terms == 0) return 0.0;
  return std::sqrt(sum / static_cast<double>(terms));
}

std::vector<int> assign_by_frequency(const std::vector<double>& estimated_f,
                                     const std::vector<double>& true_f) {
  const std::size_t k = true_f.size();
  if (estimated_f.size() != k) {
    throw std::invalid_argument("assign_by_frequency: size mismatch");
  }
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      cost += std::abs(estimated_f[static_cast<std::size_t>(perm[i])] - true_f[i]);
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

ArrayGeometry make_geometry(const ExperimentConfig& cfg) {
  switch (cfg.geometry) {
    case GeometryKind::Ula:
      return ArrayGeometry::ula(cfg.sensors);
    case GeometryKind::Mra:
      if (cfg.sensors != 8) {
        throw std::invalid_argument("the bundled MRA layout has 8 sensors");
      }
      return ArrayGeometry::mra8();
    case GeometryKind::Custom:
      if (static_cast<int>(cfg.custom_positions.size()) != cfg.sensors) {
        throw std::invalid_argument("custom geometry needs one position per sensor");
      }
      return ArrayGeometry(cfg.custom_positions);
  }
  throw std::logic_error("unreachable geometry kind");
}

SamplingPattern make_pattern(const ExperimentConfig& cfg, int branches,
                             std::mt19937_64& rng) {
  switch (cfg.pattern) {
    case PatternPolicy::First:
      return SamplingPattern::first(cfg.reduction, branches);
    case PatternPolicy::Random:
      return SamplingPattern::random(cfg.reduction, branches, rng);
    case PatternPolicy::Explicit:
      return SamplingPattern(cfg.reduction, cfg.explicit_cosets);
  }
  throw std::logic_error("unreachable pattern policy");
}

SourceEnsemble draw_sources(int count, double f_nyquist, int reduction,
                            std::mt19937_64& rng) {
  if (count < 1 || count > 5) {
    throw std::invalid_argument("draw_sources: the banded direction grid covers 1..5 sources");
  }
  if (count > reduction) {
    throw std::invalid_argument("draw_sources: more sources than sub-bands");
  }

  // bands around 10 j degrees, picked center-out: 0, -1, +1, -2, +2
  static constexpr int kBandOrder[5] = {0, -1, 1, -2, 2};
  std::vector<int> bands(kBandOrder, kBandOrder + count);
  std::sort(bands.begin(), bands.end());

  constexpr double deg = kPi / 180.0;
  std::vector<Source> sources(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double center = 10.0 * bands[static_cast<std::size_t>(k)];
    std::uniform_real_distribution<double> theta((center - 2.5) * deg,
                                                 (center + 2.5) * deg);
    sources[static_cast<std::size_t>(k)].theta = theta(rng);
    sources[static_cast<std::size_t>(k)].power = 1.0;
  }

  std::uniform_real_distribution<double> carrier(0.05 * f_nyquist, 0.95 * f_nyquist);
  while (true) {
    std::vector<int> seen;
    for (int k = 0; k < count; ++k) {
      const double f = carrier(rng);
      sources[static_cast<std::size_t>(k)].f = f;
      seen.push_back(1 + static_cast<int>(std::floor(f * reduction / f_nyquist)));
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) == seen.end()) break;
  }
  return SourceEnsemble(std::move(sources), f_nyquist, reduction);
}

namespace {

struct TrialOutcome {
  std::optional<EstimationResult> jdftd_result;
  std::optional<EstimationResult> jdfsd_result;
  bool jdftd_failed = false;
  bool jdfsd_failed = false;
  std::vector<double> true_phi, true_f, true_theta;
  bool crb_valid = false;
  double crb_sub_phase = 0.0;
  double crb_ny_phase = 0.0;
  double crb_sub_freq = 0.0;
  double crb_ny_freq = 0.0;
  std::string error;  // configuration-level failure, reported after the join
};

struct SweepPoint {
  double value;
  double snr_db;
  int branches;
  int sources;
};

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> points;
  switch (cfg.sweep) {
    case SweepKind::Snr:
      for (double snr : cfg.snr_db) {
        points.push_back({snr, snr, cfg.branches, cfg.sources});
      }
      break;
    case SweepKind::Branches: {
      if (cfg.pattern == PatternPolicy::Explicit) {
        throw std::invalid_argument("branch sweep cannot use an explicit pattern");
      }
      const double snr = cfg.snr_db.empty() ? 0.0 : cfg.snr_db.front();
      std::vector<int> values;
      for (int p = std::min(4, cfg.reduction); p <= cfg.reduction; p += 2) {
        values.push_back(p);
      }
      if (values.empty() || values.back() != cfg.reduction) {
        values.push_back(cfg.reduction);
      }
      for (int p : values) {
        points.push_back({static_cast<double>(p), snr, p, cfg.sources});
      }
      break;
    }
    case SweepKind::Sources: {
      const double snr = cfg.snr_db.empty() ? 0.0 : cfg.snr_db.front();
      const int max_k = std::min({5, cfg.sensors - 1, cfg.reduction});
      for (int k = 1; k <= max_k; ++k) {
        points.push_back({static_cast<double>(k), snr, cfg.branches, k});
      }
      break;
    }
  }
  return points;
}

TrialOutcome run_trial(const ExperimentConfig& cfg, const ArrayGeometry& geom,
                       const SweepPoint& point, std::size_t point_index,
                       int trial_index) {
  std::mt19937_64 rng(mix_seed({cfg.seed, static_cast<std::uint64_t>(point_index),
                                static_cast<std::uint64_t>(trial_index)}));

  TrialOutcome out;
  const SamplingPattern pattern = make_pattern(cfg, point.branches, rng);
  const SourceEnsemble ensemble =
      draw_sources(point.sources, cfg.nyquist_hz, cfg.reduction, rng);

  for (int k = 0; k < ensemble.count(); ++k) {
    const Source& s = ensemble.sources()[static_cast<std::size_t>(k)];
    out.true_phi.push_back(spatial_phase(s.theta, s.f, cfg.nyquist_hz, cfg.spacing));
    out.true_f.push_back(s.f);
    out.true_theta.push_back(s.theta);
  }

  const NyquistRecord record =
      synthesize_nyquist(ensemble, geom, cfg.snapshots, point.snr_db, rng, cfg.spacing);
  const CosetStreams streams = multicoset_sample(record, pattern);
  const SnapshotSet snaps = assemble_snapshots(streams, pattern, cfg.nyquist_hz);
  const ModulationMatrix b = modulation_matrix(pattern);

  // bounds evaluated at the trial's true parameters, estimator independent;
  // a draw with near-identical phases makes the Nyquist bound singular, in
  // which case the trial simply contributes no bound sample
  if (record.sigma2 > 0.0) {
    try {
      CrbInputs crb_in{geom,
                       out.true_phi,
                       {},
                       pattern,
                       Eigen::MatrixXcd::Identity(ensemble.count(), ensemble.count()),
                       record.sigma2,
                       static_cast<double>(cfg.snapshots),
                       cfg.nyquist_hz};
      for (int k = 0; k < ensemble.count(); ++k) {
        crb_in.omega.push_back(ensemble.subband(k));
      }
      out.crb_sub_phase = crb_sub_phase(crb_in).diagonal().mean();
      out.crb_ny_phase = crb_ny_phase(crb_in).diagonal().mean();
      out.crb_sub_freq = crb_frequency(crb_in, FrequencyCrbMode::Sub).mean();
      out.crb_ny_freq = crb_frequency(crb_in, FrequencyCrbMode::Nyquist).mean();
      out.crb_valid = true;
    } catch (const std::exception&) {
      out.crb_valid = false;
    }
  }

  const bool want_jdftd = cfg.algorithms != AlgorithmChoice::Jdfsd;
  const bool want_jdfsd = cfg.algorithms != AlgorithmChoice::Jdftd;

  if (want_jdftd) {
    try {
      RalsOptions opts = cfg.rals;
      opts.seed = mix_seed({cfg.seed, static_cast<std::uint64_t>(point_index),
                            static_cast<std::uint64_t>(trial_index), 0xa15ULL});
      EstimationResult r = jdftd(snaps, b, geom, point.sources, opts, cfg.spacing);
      if (r.degraded) {
        out.jdftd_failed = true;  // non-convergence
      } else {
        out.jdftd_result = std::move(r);
      }
    } catch (const std::exception&) {
      out.jdftd_failed = true;
    }
  }
  if (want_jdfsd) {
    try {
      out.jdfsd_result = jdfsd(snaps, b, geom, point.sources, cfg.grid_points, cfg.spacing);
    } catch (const std::exception&) {
      out.jdfsd_failed = true;
    }
  }
  return out;
}

struct ErrorAccumulator {
  double phase2 = 0.0;
  double freq2 = 0.0;
  double doa2 = 0.0;
  std::size_t terms = 0;
  int failures = 0;

  void add(const EstimationResult& result, const TrialOutcome& truth) {
    std::vector<double> est_f;
    for (const SourceEstimate& s : result.sources) est_f.push_back(s.f_hat);
    const auto perm = assign_by_frequency(est_f, truth.true_f);
    for (std::size_t k = 0; k < truth.true_f.size(); ++k) {
      const SourceEstimate& s = result.sources[static_cast<std::size_t>(perm[k])];
      const double dphi = std::remainder(s.phi_hat - truth.true_phi[k], kTwoPi);
      const double df = s.f_hat - truth.true_f[k];
      const double dtheta = (s.theta_hat - truth.true_theta[k]) * 180.0 / kPi;
      phase2 += dphi * dphi;
      freq2 += df * df;
      doa2 += dtheta * dtheta;
      ++terms;
    }
  }

  SweepRow finish(double sweep_value, const std::string& name, int trials) const {
    SweepRow row;
    row.sweep_value = sweep_value;
    row.algorithm = name;
    row.trials = trials;
    row.failures = failures;
    if (terms > 0) {
      row.rmse_phase = std::sqrt(phase2 / static_cast<double>(terms));
      row.rmse_freq = std::sqrt(freq2 / static_cast<double>(terms));
      row.rmse_doa_deg = std::sqrt(doa2 / static_cast<double>(terms));
    }
    return row;
  }
};

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("run_sweep: need at least one trial");
  const ArrayGeometry geom = make_geometry(cfg);
  const auto points = sweep_points(cfg);

  const int workers = cfg.threads > 0
                          ? cfg.threads
                          : std::max(1u, std::thread::hardware_concurrency());

  SweepResult result;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const SweepPoint& point = points[pi];
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));

    std::atomic<int> next{0};
    auto work = [&]() {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= cfg.trials) return;
        try {
          outcomes[static_cast<std::size_t>(t)] = run_trial(cfg, geom, point, pi, t);
        } catch (const std::exception& e) {
          outcomes[static_cast<std::size_t>(t)].error = e.what();
        }
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(workers));
      for (int w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
    for (const TrialOutcome& o : outcomes) {
      if (!o.error.empty()) throw std::runtime_error("run_sweep: " + o.error);
    }

    // merge in trial order so output never depends on scheduling
    ErrorAccumulator td_acc, sd_acc;
    double crb_sub_phase_sum = 0.0, crb_ny_phase_sum = 0.0;
    double crb_sub_freq_sum = 0.0, crb_ny_freq_sum = 0.0;
    int crb_samples = 0;
    for (const TrialOutcome& o : outcomes) {
      if (o.crb_valid) {
        crb_sub_phase_sum += o.crb_sub_phase;
        crb_ny_phase_sum += o.crb_ny_phase;
        crb_sub_freq_sum += o.crb_sub_freq;
        crb_ny_freq_sum += o.crb_ny_freq;
        ++crb_samples;
      }
      if (o.jdftd_failed) ++td_acc.failures;
      if (o.jdftd_result) td_acc.add(*o.jdftd_result, o);
      if (o.jdfsd_failed) ++sd_acc.failures;
      if (o.jdfsd_result) sd_acc.add(*o.jdfsd_result, o);
    }

    const double inv_crb = crb_samples > 0 ? 1.0 / crb_samples : 0.0;
    auto with_crb = [&](SweepRow row) {
      row.crb_sub_phase = crb_sub_phase_sum * inv_crb;
      row.crb_ny_phase = crb_ny_phase_sum * inv_crb;
      row.crb_sub_freq = crb_sub_freq_sum * inv_crb;
      row.crb_ny_freq = crb_ny_freq_sum * inv_crb;
      return row;
    };

    if (cfg.algorithms != AlgorithmChoice::Jdfsd) {
      result.rows.push_back(with_crb(td_acc.finish(point.value, "jdftd", cfg.trials)));
    }
    if (cfg.algorithms != AlgorithmChoice::Jdftd) {
      result.rows.push_back(with_crb(sd_acc.finish(point.value, "jdfsd", cfg.trials)));
    }
  }
  return result;
}

void write_csv(const SweepResult& result, std::ostream& os) {
  os << "sweep,algorithm,rmse_phase_rad,rmse_freq_hz,rmse_doa_deg,crb_sub_phase,"
        "crb_ny_phase,crb_sub_freq,crb_ny_freq,trials,failures\n";
  for (const SweepRow& r : result.rows) {
    os << format_double(r.sweep_value) << ',' << r.algorithm << ','
       << format_double(r.rmse_phase) << ',' << format_double(r.rmse_freq) << ','
       << format_double(r.rmse_doa_deg) << ',' << format_double(r.crb_sub_phase)
       << ',' << format_double(r.crb_ny_phase) << ','
       << format_double(r.crb_sub_freq) << ',' << format_double(r.crb_ny_freq)
       << ',' << r.trials << ',' << r.failures << '\n';
  }
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream oss;
  write_csv(result, oss);
  return oss.str();
}

ScenarioReport simulate_scenario(const ExperimentConfig& cfg) {
  const ArrayGeometry geom = make_geometry(cfg);
  std::mt19937_64 rng(mix_seed({cfg.seed, 0, 0}));

  const SamplingPattern pattern = make_pattern(cfg, cfg.branches, rng);
  const SourceEnsemble ensemble =
      draw_sources(cfg.sources, cfg.nyquist_hz, cfg.reduction, rng);
  const double snr = cfg.snr_db.empty() ? 20.0 : cfg.snr_db.front();

  ScenarioReport report{.truth = ensemble.sources(),
                        .true_phis = {},
                        .true_subbands = {},
                        .pattern = pattern,
                        .sigma2 = 0.0,
                        .results = {}};
  for (int k = 0; k < ensemble.count(); ++k) {
    const Source& s = ensemble.sources()[static_cast<std::size_t>(k)];
    report.true_phis.push_back(spatial_phase(s.theta, s.f, cfg.nyquist_hz, cfg.spacing));
    report.true_subbands.push_back(ensemble.subband(k));
  }

  const NyquistRecord record =
      synthesize_nyquist(ensemble, geom, cfg.snapshots, snr, rng, cfg.spacing);
  report.sigma2 = record.sigma2;
  const CosetStreams streams = multicoset_sample(record, pattern);
  const SnapshotSet snaps = assemble_snapshots(streams, pattern, cfg.nyquist_hz);
  const ModulationMatrix b = modulation_matrix(pattern);

  if (cfg.algorithms != AlgorithmChoice::Jdfsd) {
    RalsOptions opts = cfg.rals;
    opts.seed = mix_seed({cfg.seed, 0, 0, 0xa15ULL});
    report.results.push_back(jdftd(snaps, b, geom, cfg.sources, opts, cfg.spacing));
  }
  if (cfg.algorithms != AlgorithmChoice::Jdftd) {
    report.results.push_back(jdfsd(snaps, b, geom, cfg.sources, cfg.grid_points, cfg.spacing));
  }
  return report;
}

}  // namespace subnyq
