#include <benchmark/benchmark.h>

#include <limits>

#include "subnyq/crb.hpp"
#include "subnyq/estimators.hpp"
#include "subnyq/signal.hpp"
#include "subnyq/subspace.hpp"
#include "subnyq/trilinear.hpp"

using namespace subnyq;

namespace {

struct Fixture {
  ArrayGeometry geom = ArrayGeometry::ula(8);
  SamplingPattern pattern = SamplingPattern::first(8, 8);
  ModulationMatrix b = modulation_matrix(pattern);
  SourceEnsemble ens{{{-0.2, 1.62e9, 1.0}, {0.05, 5.41e9, 1.0}, {0.33, 8.87e9, 1.0}},
                     10e9,
                     8};
  NyquistRecord record = synthesize_nyquist(ens, geom, 1024, 20.0, 42u);
  CosetStreams streams = multicoset_sample(record, pattern);
  SnapshotSet snaps = assemble_snapshots(streams, pattern, 10e9);
};

const Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

static void BM_SynthesizeNyquist(benchmark::State& state) {
  const auto& f = fixture();
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto rec = synthesize_nyquist(f.ens, f.geom, 1024, 20.0, seed++);
    benchmark::DoNotOptimize(rec.x.data());
  }
}
BENCHMARK(BM_SynthesizeNyquist);

static void BM_AssembleSnapshots(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    auto snaps = assemble_snapshots(f.streams, f.pattern, 10e9);
    benchmark::DoNotOptimize(snaps.y.data());
  }
}
BENCHMARK(BM_AssembleSnapshots);

static void BM_SampleCovariance(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    auto cov = sample_covariance(f.snaps);
    benchmark::DoNotOptimize(cov.r.data());
  }
}
BENCHMARK(BM_SampleCovariance);

static void BM_PseudoSpectrumPeaks(benchmark::State& state) {
  const auto& f = fixture();
  const auto cov = sample_covariance(f.snaps);
  const auto un = noise_subspace(cov, 3);
  for (auto _ : state) {
    auto peaks = pseudo_spectrum_peaks(un, f.b, f.geom, 3,
                                       static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(peaks.data());
  }
}
BENCHMARK(BM_PseudoSpectrumPeaks)->Arg(1024)->Arg(4096);

static void BM_Jdfsd(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    auto result = jdfsd(f.snaps, f.b, f.geom, 3);
    benchmark::DoNotOptimize(result.sources.data());
  }
}
BENCHMARK(BM_Jdfsd);

static void BM_RalsDecompose(benchmark::State& state) {
  const auto& f = fixture();
  RalsOptions opts;
  opts.restarts = 1;
  for (auto _ : state) {
    auto factors = rals_decompose(f.snaps.y, 8, 8, 3, opts);
    benchmark::DoNotOptimize(factors.a.data());
  }
}
BENCHMARK(BM_RalsDecompose);

static void BM_PeriodogramTone(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Eigen::VectorXcd z(n);
  for (int i = 0; i < n; ++i) z(i) = std::polar(1.0, 0.37 * i);
  for (auto _ : state) {
    benchmark::DoNotOptimize(periodogram_ml_tone(z));
  }
}
BENCHMARK(BM_PeriodogramTone)->Arg(128)->Arg(1024);

static void BM_CrbSubPhase(benchmark::State& state) {
  const auto& f = fixture();
  CrbInputs in{f.geom,
               {-0.4, 0.1, 0.55},
               {2, 5, 7},
               SamplingPattern::first(20, 20),
               Eigen::MatrixXcd::Identity(3, 3),
               1.0,
               4000.0,
               10e9};
  for (auto _ : state) {
    auto bound = crb_sub_phase(in);
    benchmark::DoNotOptimize(bound.data());
  }
}
BENCHMARK(BM_CrbSubPhase);

BENCHMARK_MAIN();
