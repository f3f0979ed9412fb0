#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "subnyq/signal.hpp"
#include "subnyq/subspace.hpp"

using namespace subnyq;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SnapshotSet make_snaps(const SourceEnsemble& ens, const ArrayGeometry& geom,
                       const SamplingPattern& pattern, Eigen::Index t, double snr_db,
                       std::uint64_t seed) {
  const auto rec = synthesize_nyquist(ens, geom, t, snr_db, seed);
  return assemble_snapshots(multicoset_sample(rec, pattern), pattern, ens.f_nyquist());
}

Eigen::MatrixXcd random_unitary(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) m(i, j) = cd(g(rng), g(rng));
  }
  return Eigen::HouseholderQR<Eigen::MatrixXcd>(m).householderQ();
}

}  // namespace

TEST_CASE("single-snapshot covariance is the outer product") {
  SnapshotSet snaps;
  snaps.sensors = 2;
  snaps.branches = 2;
  snaps.f_sub = 1.0;
  snaps.y.resize(4, 1);
  snaps.y << cd(1, 0), cd(0, 1), cd(-1, 0), cd(0.5, 0.5);
  const auto cov = sample_covariance(snaps);
  CHECK(cov.snapshots_used == 1);
  CHECK((cov.r - snaps.y.col(0) * snaps.y.col(0).adjoint()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("noiseless covariance has numerical rank K") {
  const int l = 8, n = 128;
  const double fn = 10e9, fsub = fn / l;
  // bin-aligned carriers so the model is exactly rank K
  const double f1 = (1 - 1) * fsub + 25 * fsub / n;
  const double f2 = (6 - 1) * fsub + 77 * fsub / n;
  const SourceEnsemble ens({{-0.1, f1, 1.0}, {0.25, f2, 1.0}}, fn, l);
  const auto pattern = SamplingPattern::first(l, l);
  const auto snaps = make_snaps(ens, ArrayGeometry::ula(4), pattern, l * n, kInf, 4u);
  const auto cov = sample_covariance(snaps);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(cov.r);
  const auto& vals = eig.eigenvalues();
  const Eigen::Index top = vals.size() - 1;
  CHECK(vals(top) / std::max(vals(top - 2), 1e-300) > 1e6);
}

TEST_CASE("pure-noise covariance concentrates around sigma2 I") {
  const int l = 4, n = 1024;
  const SourceEnsemble ens({}, 10e9, l);
  const auto pattern = SamplingPattern::first(l, l);
  const auto snaps = make_snaps(ens, ArrayGeometry::ula(3), pattern, l * n, 0.0, 10u);
  const auto cov = sample_covariance(snaps);
  const double sigma2 = 1.0;  // 0 dB with unit reference power

  for (Eigen::Index i = 0; i < cov.r.rows(); ++i) {
    CHECK(std::real(cov.r(i, i)) == doctest::Approx(sigma2).epsilon(0.2));
    for (Eigen::Index j = 0; j < cov.r.cols(); ++j) {
      if (i != j) {
        CHECK(std::abs(cov.r(i, j)) < 5.0 * sigma2 / std::sqrt(double(n)));
      }
    }
  }
}

TEST_CASE("noise subspace of a diagonal covariance") {
  CovarianceEstimate cov;
  cov.r = Eigen::MatrixXcd::Zero(2, 2);
  cov.r(0, 0) = 4.0;
  cov.r(1, 1) = 1.0;
  cov.snapshots_used = 1;
  bool degenerate = true;
  const auto un = noise_subspace(cov, 1, &degenerate);
  REQUIRE(un.cols() == 1);
  CHECK_FALSE(degenerate);
  CHECK(std::abs(std::abs(un(1, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(un(0, 0)) < 1e-12);
}

TEST_CASE("identity covariance flags a degenerate gap") {
  CovarianceEstimate cov;
  cov.r = Eigen::MatrixXcd::Identity(6, 6);
  cov.snapshots_used = 10;
  bool degenerate = false;
  const auto un = noise_subspace(cov, 1, &degenerate);
  CHECK(degenerate);
  CHECK(un.cols() == 5);
  CHECK((un.adjoint() * un - Eigen::MatrixXcd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("noise subspace is orthogonal to the true reception columns") {
  const int l = 8, n = 64;
  const double fn = 10e9, fsub = fn / l;
  const double f1 = (2 - 1) * fsub + 10 * fsub / n;
  const double f2 = (5 - 1) * fsub + 40 * fsub / n;
  const SourceEnsemble ens({{-0.3, f1, 1.0}, {0.2, f2, 1.0}}, fn, l);
  const auto geom = ArrayGeometry::ula(4);
  const auto pattern = SamplingPattern::first(l, l);
  const auto snaps = make_snaps(ens, geom, pattern, l * n, kInf, 12u);

  const auto cov = sample_covariance(snaps);
  const auto un = noise_subspace(cov, 2);
  CHECK((un.adjoint() * un -
         Eigen::MatrixXcd::Identity(un.cols(), un.cols()))
            .cwiseAbs()
            .maxCoeff() < 1e-10);

  std::vector<double> phis;
  std::vector<int> omega;
  for (int k = 0; k < 2; ++k) {
    const Source& s = ens.sources()[static_cast<std::size_t>(k)];
    phis.push_back(spatial_phase(s.theta, s.f, fn));
    omega.push_back(ens.subband(k));
  }
  const auto model = reception_matrix(geom, phis, modulation_matrix(pattern), omega);
  CHECK((un.adjoint() * model.g).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("pseudo-spectrum values are positive and invariant to re-basis") {
  const int l = 4, n = 64;
  const double fn = 10e9, fsub = fn / l;
  const double f = (3 - 1) * fsub + 20 * fsub / n;
  const SourceEnsemble ens({{0.3, f, 1.0}}, fn, l);
  const auto geom = ArrayGeometry::ula(4);
  const auto pattern = SamplingPattern::first(l, l);
  const auto snaps = make_snaps(ens, geom, pattern, l * n, 15.0, 19u);
  const auto b = modulation_matrix(pattern);

  const auto cov = sample_covariance(snaps);
  const auto un = noise_subspace(cov, 1);
  const auto spec = pseudo_spectrum(un, b, geom, 512);
  CHECK(spec.values.minCoeff() > 0.0);

  const Eigen::MatrixXcd mixed =
      un * random_unitary(static_cast<int>(un.cols()), 5);
  const auto spec2 = pseudo_spectrum(mixed, b, geom, 512);
  CHECK((spec.values - spec2.values).cwiseAbs().maxCoeff() <
        1e-9 * spec.values.maxCoeff());
}

TEST_CASE("noiseless peak search lands on the true band and phase") {
  const int l = 8, n = 64;
  const double fn = 10e9, fsub = fn / l;
  const double phi0 = 0.7;
  // place the source so its spatial phase is exactly phi0
  const double f = (3 - 1) * fsub + 16 * fsub / n;
  const double theta = std::asin(phi0 * fn / (kPi * f));
  const SourceEnsemble ens({{theta, f, 1.0}}, fn, l);
  const auto geom = ArrayGeometry::ula(6);
  const auto pattern = SamplingPattern::first(l, l);
  const auto snaps = make_snaps(ens, geom, pattern, l * n, kInf, 23u);

  const auto cov = sample_covariance(snaps);
  const auto un = noise_subspace(cov, 1);
  const auto peaks = pseudo_spectrum_peaks(un, modulation_matrix(pattern), geom, 1);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].subband == 3);
  CHECK(std::abs(peaks[0].phi - phi0) < 1e-4);
}

TEST_CASE("two sources with identical spatial phase split by sub-band") {
  const int l = 8, n = 64;
  const double fn = 10e9, fsub = fn / l;
  const double phi0 = 0.3;  // shared spatial phase: unresolvable in space alone
  const double f1 = (2 - 1) * fsub + 12 * fsub / n;
  const double f2 = (6 - 1) * fsub + 44 * fsub / n;
  const double theta1 = std::asin(phi0 * fn / (kPi * f1));
  const double theta2 = std::asin(phi0 * fn / (kPi * f2));
  const SourceEnsemble ens({{theta1, f1, 1.0}, {theta2, f2, 1.0}}, fn, l);
  const auto geom = ArrayGeometry::ula(6);
  const auto pattern = SamplingPattern::first(l, l);
  const auto snaps = make_snaps(ens, geom, pattern, l * n, kInf, 29u);

  const auto cov = sample_covariance(snaps);
  const auto un = noise_subspace(cov, 2);
  auto peaks = pseudo_spectrum_peaks(un, modulation_matrix(pattern), geom, 2);
  std::sort(peaks.begin(), peaks.end(),
            [](const PseudoPeak& a, const PseudoPeak& b) { return a.subband < b.subband; });
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].subband == 2);
  CHECK(peaks[1].subband == 6);
  CHECK(std::abs(peaks[0].phi - phi0) < 1e-3);
  CHECK(std::abs(peaks[1].phi - phi0) < 1e-3);
}

TEST_CASE("flat spectrum raises a peak-search error") {
  const auto geom = ArrayGeometry::ula(3);
  const auto pattern = SamplingPattern::first(4, 4);
  const auto b = modulation_matrix(pattern);
  // noise basis spanning everything: K = 0 model queried with K = 1
  const Eigen::MatrixXcd un = Eigen::MatrixXcd::Identity(12, 12);
  CHECK_THROWS_AS(pseudo_spectrum_peaks(un, b, geom, 1), peak_search_error);
}

TEST_CASE("least-squares recovery reproduces noiseless sources") {
  const int l = 8, n = 64;
  const double fn = 10e9, fsub = fn / l;
  const double f1 = (1 - 1) * fsub + 20 * fsub / n;
  const double f2 = (4 - 1) * fsub + 33 * fsub / n;
  const SourceEnsemble ens({{-0.15, f1, 1.0}, {0.3, f2, 1.0}}, fn, l);
  const auto geom = ArrayGeometry::ula(4);
  const auto pattern = SamplingPattern::first(l, l);
  const auto snaps = make_snaps(ens, geom, pattern, l * n, kInf, 37u);

  std::vector<double> phis;
  std::vector<int> omega;
  for (int k = 0; k < 2; ++k) {
    const Source& s = ens.sources()[static_cast<std::size_t>(k)];
    phis.push_back(spatial_phase(s.theta, s.f, fn));
    omega.push_back(ens.subband(k));
  }
  const auto model = reception_matrix(geom, phis, modulation_matrix(pattern), omega);
  const Eigen::MatrixXcd recovered = model.g.colPivHouseholderQr().solve(snaps.y);
  CHECK((snaps.y - model.g * recovered).norm() / snaps.y.norm() < 1e-8);
}

TEST_CASE("noiseless end-to-end subspace estimation") {
  const int l = 8, n = 64;
  const double fn = 10e9, fsub = fn / l;
  const std::vector<int> bands = {1, 4, 7};
  const std::vector<int> bins = {9, 27, 48};
  const std::vector<double> thetas = {-0.35, 0.02, 0.38};
  std::vector<Source> sources;
  for (int k = 0; k < 3; ++k) {
    sources.push_back({thetas[static_cast<std::size_t>(k)],
                       (bands[static_cast<std::size_t>(k)] - 1) * fsub +
                           bins[static_cast<std::size_t>(k)] * fsub / n,
                       1.0});
  }
  const SourceEnsemble ens(sources, fn, l);
  const auto geom = ArrayGeometry::ula(8);
  const auto pattern = SamplingPattern::first(l, l);
  const auto snaps = make_snaps(ens, geom, pattern, l * n, kInf, 41u);

  const auto result = jdfsd(snaps, modulation_matrix(pattern), geom, 3);
  REQUIRE(result.sources.size() == 3);
  CHECK(result.residual < 1e-7);
  for (int k = 0; k < 3; ++k) {
    const Source& truth = ens.sources()[static_cast<std::size_t>(k)];
    const auto& est = result.sources[static_cast<std::size_t>(k)];
    CHECK(est.omega_hat == ens.subband(k));
    CHECK(std::abs(est.phi_hat - spatial_phase(truth.theta, truth.f, fn)) < 1e-3);
    CHECK(std::abs(est.f_hat - truth.f) < 1e-4 * fsub);
    CHECK(std::abs(est.theta_hat - truth.theta) < 1e-3);
  }
}

TEST_CASE("off-grid and band-edge tones are recovered to sub-Hz noiselessly") {
  const int l = 8, n = 128;
  const double fn = 10e9, fsub = fn / l;
  // one source 0.62 bins below a band boundary, the rest well off-grid
  const double f1 = (4 - 1) * fsub + 127.38 * fsub / n;
  const double f2 = (2 - 1) * fsub + 57.43 * fsub / n;
  const double f3 = (7 - 1) * fsub + 12.91 * fsub / n;
  const SourceEnsemble ens({{0.07, f1, 1.0}, {-0.31, f2, 1.0}, {0.28, f3, 1.0}}, fn, l);
  const auto geom = ArrayGeometry::ula(8);
  const auto pattern = SamplingPattern::first(l, l);
  const auto snaps = make_snaps(ens, geom, pattern, l * n, kInf, 2024u);

  const auto result = jdfsd(snaps, modulation_matrix(pattern), geom, 3);
  CHECK(result.residual < 1e-6);
  CHECK_FALSE(result.degraded);

  const std::vector<double> truth_f = {f1, f2, f3};
  std::vector<double> est_f;
  for (const auto& s : result.sources) est_f.push_back(s.f_hat);
  for (int k = 0; k < 3; ++k) {
    double best = 1e18;
    int match = 0;
    for (int j = 0; j < 3; ++j) {
      if (std::abs(est_f[static_cast<std::size_t>(j)] -
                   truth_f[static_cast<std::size_t>(k)]) < best) {
        best = std::abs(est_f[static_cast<std::size_t>(j)] -
                        truth_f[static_cast<std::size_t>(k)]);
        match = j;
      }
    }
    const auto& est = result.sources[static_cast<std::size_t>(match)];
    CHECK(est.omega_hat == ens.subband(k));
    CHECK(std::abs(est.f_hat - truth_f[static_cast<std::size_t>(k)]) < 5.0);
    const double phi = spatial_phase(ens.sources()[static_cast<std::size_t>(k)].theta,
                                     truth_f[static_cast<std::size_t>(k)], fn);
    CHECK(std::abs(est.phi_hat - phi) < 1e-6);
  }
}

TEST_CASE("band-edge tone in noise keeps phase and frequency near the bound") {
  const int l = 8, n = 128;
  const double fn = 10e9, fsub = fn / l;
  const double f1 = (4 - 1) * fsub + 127.4 * fsub / n;  // 0.6 bins from the top
  const double f2 = (6 - 1) * fsub + 40.2 * fsub / n;
  const SourceEnsemble ens({{0.1, f1, 1.0}, {-0.2, f2, 1.0}}, fn, l);
  const auto geom = ArrayGeometry::ula(8);
  const auto pattern = SamplingPattern::first(l, l);
  const auto snaps = make_snaps(ens, geom, pattern, l * n, 30.0, 91u);

  const auto result = jdfsd(snaps, modulation_matrix(pattern), geom, 2);
  const std::vector<double> truth_f = {f1, f2};
  std::vector<double> est_f;
  for (const auto& s : result.sources) est_f.push_back(s.f_hat);
  for (int k = 0; k < 2; ++k) {
    double best = 1e18;
    std::size_t match = 0;
    for (std::size_t j = 0; j < 2; ++j) {
      const double d = std::abs(est_f[j] - truth_f[static_cast<std::size_t>(k)]);
      if (d < best) {
        best = d;
        match = j;
      }
    }
    CHECK(best < 2e4);  // a couple of bound widths, far below a bin
    const double phi = spatial_phase(ens.sources()[static_cast<std::size_t>(k)].theta,
                                     truth_f[static_cast<std::size_t>(k)], fn);
    CHECK(std::abs(result.sources[match].phi_hat - phi) < 1e-3);
  }
}

TEST_CASE("subspace estimator works on the sparse geometry") {
  const int l = 4, n = 64;
  const double fn = 10e9, fsub = fn / l;
  const double f = (2 - 1) * fsub + 31 * fsub / n;
  const SourceEnsemble ens({{0.18, f, 1.0}}, fn, l);
  const auto geom = ArrayGeometry::mra8();
  const auto pattern = SamplingPattern::first(l, l);
  const auto snaps = make_snaps(ens, geom, pattern, l * n, kInf, 47u);

  const auto result = jdfsd(snaps, modulation_matrix(pattern), geom, 1);
  CHECK(std::abs(result.sources[0].f_hat - f) < 1e-4 * fsub);
  CHECK(std::abs(result.sources[0].theta_hat - 0.18) < 1e-4);
}
