#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "subnyq/fft.hpp"
#include "subnyq/multicoset.hpp"
#include "subnyq/signal.hpp"

using namespace subnyq;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("pattern validation") {
  CHECK_THROWS_AS(SamplingPattern(4, {0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(SamplingPattern(4, {0, 4}), std::invalid_argument);
  CHECK_THROWS_AS(SamplingPattern(4, {}), std::invalid_argument);
  CHECK_THROWS_AS(SamplingPattern(4, {0, 1, 2, 3, 3}), std::invalid_argument);
  const auto p = SamplingPattern::first(8, 3);
  CHECK(p.cosets() == std::vector<int>{0, 1, 2});
  CHECK(p.average_rate(10e9) == doctest::Approx(3.75e9));
}

TEST_CASE("sub-band identifiability") {
  CHECK(SamplingPattern(8, {0, 1}).subband_identifiable());
  CHECK(SamplingPattern(8, {0, 3, 5}).subband_identifiable());
  CHECK_FALSE(SamplingPattern(4, {0, 2}).subband_identifiable());  // shared parity
  CHECK_FALSE(SamplingPattern(8, {1, 3, 5}).subband_identifiable());
  CHECK_FALSE(SamplingPattern(6, {0}).subband_identifiable());     // single branch
  CHECK(SamplingPattern(6, {0, 1, 2, 3, 4, 5}).subband_identifiable());
}

TEST_CASE("random patterns are valid and identifiable") {
  std::mt19937_64 rng(321);
  for (int i = 0; i < 200; ++i) {
    std::uniform_int_distribution<int> ld(2, 24);
    const int l = ld(rng);
    std::uniform_int_distribution<int> pd(2, l);
    const int p = pd(rng);
    const auto pattern = SamplingPattern::random(l, p, rng);
    CHECK(pattern.branches() == p);
    if (p >= 2) CHECK(pattern.subband_identifiable());
  }
}

TEST_CASE("modulation matrix pinned entries for L=2") {
  const auto b = modulation_matrix(SamplingPattern(2, {0, 1}));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(b.b(0, 0) - cd(s, 0)) < 1e-15);
  CHECK(std::abs(b.b(0, 1) - cd(s, 0)) < 1e-15);
  CHECK(std::abs(b.b(1, 0) - cd(-s, 0)) < 1e-14);  // exp(j pi * 1)
  CHECK(std::abs(b.b(1, 1) - cd(s, 0)) < 1e-14);   // exp(j pi * 2)
}

TEST_CASE("full-coset modulation matrix is unitary") {
  const auto b = modulation_matrix(SamplingPattern::first(4, 4));
  const Eigen::MatrixXcd ghg = b.b.adjoint() * b.b;
  CHECK((ghg - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("row orthonormality holds for partial patterns") {
  const auto b = modulation_matrix(SamplingPattern(4, {0, 2}));
  const Eigen::MatrixXcd bbh = b.b * b.b.adjoint();
  CHECK((bbh - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("row orthonormality across random patterns") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100; ++i) {
    std::uniform_int_distribution<int> ld(2, 32);
    const int l = ld(rng);
    std::uniform_int_distribution<int> pd(1, l);
    const int p = pd(rng);
    const auto pattern = p == 1 ? SamplingPattern(l, {0}) : SamplingPattern::random(l, p, rng);
    const auto b = modulation_matrix(pattern);
    const Eigen::MatrixXcd bbh = b.b * b.b.adjoint();
    CHECK((bbh - Eigen::MatrixXcd::Identity(p, p)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("multicoset_sample picks the stated indices") {
  NyquistRecord rec;
  rec.x.resize(1, 6);
  for (int n = 0; n < 6; ++n) rec.x(0, n) = cd(n, 0);
  rec.t_n = 1.0;

  const auto streams = multicoset_sample(rec, SamplingPattern(3, {0, 2}));
  REQUIRE(streams.length() == 2);
  CHECK(streams.x(0, 0) == cd(0, 0));
  CHECK(streams.x(0, 1) == cd(3, 0));
  CHECK(streams.x(1, 0) == cd(2, 0));
  CHECK(streams.x(1, 1) == cd(5, 0));
}

TEST_CASE("multicoset_sample with L=1 is the identity") {
  NyquistRecord rec;
  rec.x.resize(2, 5);
  for (int m = 0; m < 2; ++m) {
    for (int n = 0; n < 5; ++n) rec.x(m, n) = cd(m, n);
  }
  const auto streams = multicoset_sample(rec, SamplingPattern(1, {0}));
  CHECK((streams.x - rec.x).norm() == 0.0);
}

TEST_CASE("multicoset_sample rejects non-divisible lengths") {
  NyquistRecord rec;
  rec.x = Eigen::MatrixXcd::Zero(1, 7);
  CHECK_THROWS_AS(multicoset_sample(rec, SamplingPattern(3, {0, 1})), std::invalid_argument);
}

TEST_CASE("subsampling preserves white-noise variance") {
  const SourceEnsemble ens({}, 10e9, 4);
  const auto rec = synthesize_nyquist(ens, ArrayGeometry::ula(2), 4 * 4096, 0.0, 31u);
  const auto streams = multicoset_sample(rec, SamplingPattern(4, {1, 3}));
  for (Eigen::Index r = 0; r < streams.x.rows(); ++r) {
    const double var = streams.x.row(r).squaredNorm() / 4096.0;
    CHECK(var == doctest::Approx(rec.sigma2).epsilon(0.05));
  }
}

TEST_CASE("assemble_snapshots maps zeros to zeros and keeps energy") {
  const SamplingPattern pattern(4, {0, 1, 2, 3});

  CosetStreams zero;
  zero.sensors = 2;
  zero.branches = 4;
  zero.x = Eigen::MatrixXcd::Zero(8, 16);
  const auto empty = assemble_snapshots(zero, pattern, 10e9);
  CHECK(empty.y.norm() == 0.0);

  const SourceEnsemble ens({{0.2, 3.3e9, 1.0}}, 10e9, 4);
  const auto rec = synthesize_nyquist(ens, ArrayGeometry::ula(2), 256, 10.0, 8u);
  const auto streams = multicoset_sample(rec, pattern);
  const auto snaps = assemble_snapshots(streams, pattern, 10e9);
  CHECK(snaps.y.squaredNorm() ==
        doctest::Approx(streams.x.squaredNorm()).epsilon(1e-10));
  CHECK(snaps.f_sub == doctest::Approx(2.5e9));
  CHECK(snaps.bin_width() == doctest::Approx(2.5e9 / 64));
  CHECK(snaps.bin_frequency(0) == 0.0);
  CHECK(snaps.bin_frequency(5) == doctest::Approx(5.0 * 2.5e9 / 64));
}

TEST_CASE("an on-grid tone concentrates in one snapshot bin") {
  const int l = 8, n = 64;
  const double fn = 10e9, fsub = fn / l;
  const double f = (3 - 1) * fsub + 10 * fsub / n;  // band 3, bin 10
  const SourceEnsemble ens({{0.25, f, 1.0}}, fn, l);
  const auto rec = synthesize_nyquist(ens, ArrayGeometry::ula(3), l * n, kInf, 5u);
  const auto pattern = SamplingPattern::first(l, l);
  const auto snaps = assemble_snapshots(multicoset_sample(rec, pattern), pattern, fn);

  double total = 0.0, at_bin = 0.0;
  for (Eigen::Index q = 0; q < snaps.count(); ++q) {
    const double e = snaps.y.col(q).squaredNorm();
    total += e;
    if (q == 10) at_bin = e;
  }
  CHECK(at_bin / total > 0.99);
}

TEST_CASE("reception support index arithmetic") {
  const auto pattern = SamplingPattern::first(20, 4);
  const auto b = modulation_matrix(pattern);
  const auto geom = ArrayGeometry::ula(3);
  const auto model = reception_matrix(geom, {0.1, -0.4}, b, {3, 5});
  CHECK(model.support[0] == 3);
  CHECK(model.support[1] == 25);
}

TEST_CASE("reception column is the Kronecker of steering and mixing column") {
  const auto pattern = SamplingPattern(2, {0, 1});
  const auto b = modulation_matrix(pattern);
  const auto geom = ArrayGeometry::ula(2);
  const auto model = reception_matrix(geom, {0.0}, b, {1});
  const double s = 1.0 / std::sqrt(2.0);
  const cd expected[4] = {cd(s, 0), cd(-s, 0), cd(s, 0), cd(-s, 0)};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(model.g(i, 0) - expected[i]) < 1e-14);
}

TEST_CASE("reception matrix rejects duplicate sub-bands") {
  const auto b = modulation_matrix(SamplingPattern::first(8, 4));
  const auto geom = ArrayGeometry::ula(3);
  CHECK_THROWS_AS(reception_matrix(geom, {0.1, 0.2}, b, {3, 3}), std::invalid_argument);
  CHECK_THROWS_AS(reception_matrix(geom, {0.1}, b, {9}), std::invalid_argument);
}

TEST_CASE("union Gram identity") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> phase(-1.2, 1.2);
  const auto geom = ArrayGeometry::mra8();
  const auto pattern = SamplingPattern(12, {0, 1, 4, 6, 9});
  const auto b = modulation_matrix(pattern);

  std::vector<double> phis;
  std::vector<int> omega = {2, 5, 9, 12};
  Eigen::MatrixXcd a(8, 4), bsel(pattern.branches(), 4);
  for (int k = 0; k < 4; ++k) {
    phis.push_back(phase(rng));
    a.col(k) = steering_vector(geom, phis.back());
    bsel.col(k) = b.column(omega[static_cast<std::size_t>(k)]);
  }
  const auto model = reception_matrix(geom, phis, b, omega);

  const Eigen::MatrixXcd lhs = model.g.adjoint() * model.g;
  const Eigen::MatrixXcd rhs =
      (a.adjoint() * a).cwiseProduct(bsel.adjoint() * bsel);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

namespace {

// Single-source records added together; the reference-sensor coset-0 stream
// of each one is the exact baseband tone that drives the snapshot model.
struct ModelFixture {
  Eigen::MatrixXcd y;
  Eigen::MatrixXcd g;
  Eigen::MatrixXcd sbar;
};

ModelFixture build_model_case(const SamplingPattern& pattern, int sensors) {
  const int l = pattern.reduction();
  const int n = 64;
  const double fn = 10e9, fsub = fn / l;
  const auto geom = ArrayGeometry::ula(sensors);

  const std::vector<int> bands = {2, 5, 7};
  const std::vector<int> bins = {10, 33, 50};
  const std::vector<double> thetas = {-0.3, 0.2, 0.5};

  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(sensors, l * n);
  Eigen::MatrixXcd sbar(3, n);
  std::vector<double> phis;
  for (int k = 0; k < 3; ++k) {
    const double f = (bands[static_cast<std::size_t>(k)] - 1) * fsub +
                     bins[static_cast<std::size_t>(k)] * fsub / n;
    const SourceEnsemble one({{thetas[static_cast<std::size_t>(k)], f, 1.0}}, fn, l);
    const auto rec = synthesize_nyquist(one, geom, l * n, kInf,
                                        static_cast<std::uint64_t>(k + 1));
    total += rec.x;
    phis.push_back(spatial_phase(thetas[static_cast<std::size_t>(k)], f, fn));

    std::vector<cd> tone(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      tone[static_cast<std::size_t>(i)] = rec.x(0, static_cast<Eigen::Index>(i) * l);
    }
    const auto spec = fft::unitary_forward(tone);
    for (int q = 0; q < n; ++q) {
      sbar(k, q) = std::sqrt(static_cast<double>(l)) * spec[static_cast<std::size_t>(q)];
    }
  }

  NyquistRecord rec{total, 0.0, 1.0 / fn};
  const auto snaps = assemble_snapshots(multicoset_sample(rec, pattern), pattern, fn);
  const auto b = modulation_matrix(pattern);
  const auto model = reception_matrix(geom, phis, b, bands);
  return {snaps.y, model.g, sbar};
}

}  // namespace

TEST_CASE("snapshots obey the reception model exactly for on-grid tones") {
  for (const auto& pattern :
       {SamplingPattern::first(8, 8), SamplingPattern(8, {0, 2, 3, 5, 7})}) {
    const auto fix = build_model_case(pattern, 4);
    const double residual = (fix.y - fix.g * fix.sbar).norm() / fix.y.norm();
    CHECK(residual < 1e-8);
  }
}

TEST_CASE("covariance equivalence between time and frequency domains") {
  const SamplingPattern pattern(8, {0, 3, 4, 6});
  const SourceEnsemble ens({{0.2, 1.9e9, 1.0}, {-0.1, 6.1e9, 1.0}}, 10e9, 8);
  const auto rec = synthesize_nyquist(ens, ArrayGeometry::ula(3), 8 * 128, 10.0, 64u);
  const auto streams = multicoset_sample(rec, pattern);
  const Eigen::Index n = streams.length();

  const Eigen::MatrixXcd r_time = (streams.x * streams.x.adjoint()) / double(n);

  // plain unitary transform per stream: bin-by-bin covariance is preserved
  Eigen::MatrixXcd plain(streams.x.rows(), n);
  for (Eigen::Index row = 0; row < streams.x.rows(); ++row) {
    std::vector<cd> buf(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] = streams.x(row, i);
    const auto spec = fft::unitary_forward(buf);
    for (Eigen::Index q = 0; q < n; ++q) plain(row, q) = spec[static_cast<std::size_t>(q)];
  }
  const Eigen::MatrixXcd r_plain = (plain * plain.adjoint()) / double(n);
  CHECK((r_plain - r_time).cwiseAbs().maxCoeff() < 1e-10 * r_time.norm());

  // the clock-aligned assembly preserves every same-branch entry
  const auto snaps = assemble_snapshots(streams, pattern, 10e9);
  const Eigen::MatrixXcd r_aligned = (snaps.y * snaps.y.adjoint()) / double(n);
  const int p = pattern.branches();
  for (int mi = 0; mi < 3; ++mi) {
    for (int mj = 0; mj < 3; ++mj) {
      for (int ip = 0; ip < p; ++ip) {
        const Eigen::Index ri = static_cast<Eigen::Index>(mi) * p + ip;
        const Eigen::Index rj = static_cast<Eigen::Index>(mj) * p + ip;
        CHECK(std::abs(r_aligned(ri, rj) - r_time(ri, rj)) < 1e-10 * r_time.norm());
      }
    }
  }
}
