#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "subnyq/array.hpp"
#include "subnyq/common.hpp"

namespace subnyq {

struct Source {
  double theta = 0.0;  // radians, |theta| < pi/2
  double f = 0.0;      // carrier, Hz, in [0, f_nyquist)
  double power = 1.0;  // linear
};

/// Ground-truth source set plus the band bookkeeping needed to place each
/// carrier into one of the L sub-bands of width f_nyquist / L.
class SourceEnsemble {
 public:
  SourceEnsemble(std::vector<Source> sources, double f_nyquist, int reduction);

  const std::vector<Source>& sources() const { return sources_; }
  int count() const { return static_cast<int>(sources_.size()); }
  double f_nyquist() const { return f_nyquist_; }
  int reduction() const { return reduction_; }
  double f_sub() const { return f_nyquist_ / reduction_; }

  /// 1-based sub-band index of source k: 1 + floor(f_k * L / f_nyquist).
  int subband(int k) const;

  /// Residual frequency inside the sub-band, in [0, f_sub).
  double folded_frequency(int k) const;

  double mean_power() const;

 private:
  std::vector<Source> sources_;
  double f_nyquist_;
  int reduction_;
};

/// Nyquist-rate array observation block: sensors x samples, with the noise
/// variance that produced it.
struct NyquistRecord {
  Eigen::MatrixXcd x;   // M x T
  double sigma2 = 0.0;  // per-sample complex noise variance
  double t_n = 0.0;     // Nyquist sampling interval, seconds

  int sensors() const { return static_cast<int>(x.rows()); }
  Eigen::Index samples() const { return x.cols(); }
};

/// Synthesizes X[m,n] = sum_k a_m(phi_k) sqrt(power_k) e^{j(2 pi f_k n T_N + psi_k)}
/// plus circular white Gaussian noise. psi_k is a fresh uniform phase per call.
///
/// SNR is per source: sigma2 = mean(power) / 10^(snr_db/10). An infinite
/// snr_db yields a noiseless record. The number of samples must be divisible
/// by the ensemble's reduction factor so the block transform downstream is
/// well defined.
NyquistRecord synthesize_nyquist(const SourceEnsemble& ensemble,
                                 const ArrayGeometry& geom, Eigen::Index samples,
                                 double snr_db, std::mt19937_64& rng,
                                 double spacing = 1.0);

/// Seed-owning convenience overload.
NyquistRecord synthesize_nyquist(const SourceEnsemble& ensemble,
                                 const ArrayGeometry& geom, Eigen::Index samples,
                                 double snr_db, std::uint64_t seed,
                                 double spacing = 1.0);

}  // namespace subnyq
