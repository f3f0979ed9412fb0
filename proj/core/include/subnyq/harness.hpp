#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "subnyq/crb.hpp"
#include "subnyq/signal.hpp"
#include "subnyq/subspace.hpp"
#include "subnyq/trilinear.hpp"

namespace subnyq {

enum class GeometryKind { Ula, Mra, Custom };
enum class PatternPolicy { First, Random, Explicit };
enum class SweepKind { Snr, Branches, Sources };
enum class AlgorithmChoice { Jdftd, Jdfsd, Both };

struct ExperimentConfig {
  GeometryKind geometry = GeometryKind::Ula;
  std::vector<double> custom_positions;
  int sensors = 8;
  double nyquist_hz = 10e9;
  int reduction = 8;        // L
  int branches = 8;         // P
  PatternPolicy pattern = PatternPolicy::First;
  std::vector<int> explicit_cosets;
  Eigen::Index snapshots = 1024;  // T, Nyquist-rate samples
  int sources = 3;                // K
  std::vector<double> snr_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30};
  SweepKind sweep = SweepKind::Snr;
  int trials = 200;
  std::uint64_t seed = 1;
  AlgorithmChoice algorithms = AlgorithmChoice::Both;
  int threads = 0;          // worker count, 0 = hardware concurrency
  double spacing = 1.0;     // reference sensor spacing d
  int grid_points = 4096;   // phase search resolution
  RalsOptions rals;
};

struct SweepRow {
  double sweep_value = 0.0;
  std::string algorithm;
  double rmse_phase = 0.0;     // radians
  double rmse_freq = 0.0;      // Hz
  double rmse_doa_deg = 0.0;   // degrees
  double crb_sub_phase = 0.0;  // rad^2, averaged over trials and sources
  double crb_ny_phase = 0.0;
  double crb_sub_freq = 0.0;   // Hz^2
  double crb_ny_freq = 0.0;
  int trials = 0;
  int failures = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// RMSE over trials x sources of already-paired estimate/truth values.
/// Both outer dimensions must agree.
double rmse(const std::vector<std::vector<double>>& estimates,
            const std::vector<std::vector<double>>& truths);

/// Truth-to-estimate pairing by minimum total |f_hat - f|; entry k is the
/// estimate index assigned to truth source k.
std::vector<int> assign_by_frequency(const std::vector<double>& estimated_f,
                                     const std::vector<double>& true_f);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

ArrayGeometry make_geometry(const ExperimentConfig& cfg);
SamplingPattern make_pattern(const ExperimentConfig& cfg, int branches,
                             std::mt19937_64& rng);

/// Draws directions from the banded grid (centers at 10 j degrees, half
/// width 2.5 degrees, bands chosen center-out) and carriers uniformly over
/// [0.05, 0.95] f_N, redrawn until every source lands in its own sub-band.
SourceEnsemble draw_sources(int count, double f_nyquist, int reduction,
                            std::mt19937_64& rng);

/// Full Monte Carlo sweep. Trials are distributed over a worker pool; every
/// trial derives its generator from (seed, sweep index, trial index), so the
/// result is identical no matter how many workers run.
SweepResult run_sweep(const ExperimentConfig& cfg);

/// CSV emission with the fixed header
/// sweep,algorithm,rmse_phase_rad,rmse_freq_hz,rmse_doa_deg,crb_sub_phase,
/// crb_ny_phase,crb_sub_freq,crb_ny_freq,trials,failures.
void write_csv(const SweepResult& result, std::ostream& os);
std::string to_csv(const SweepResult& result);

/// One scenario at the first configured SNR: synthesize, sample, estimate.
struct ScenarioReport {
  std::vector<Source> truth;
  std::vector<double> true_phis;
  std::vector<int> true_subbands;
  SamplingPattern pattern;
  double sigma2 = 0.0;
  std::vector<EstimationResult> results;
};

ScenarioReport simulate_scenario(const ExperimentConfig& cfg);

}  // namespace subnyq
