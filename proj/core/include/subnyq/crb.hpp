#pragma once

#include <Eigen/Dense>
#include <vector>

#include "subnyq/array.hpp"
#include "subnyq/multicoset.hpp"

namespace subnyq {

/// Scenario description for the estimation bounds. snapshots counts
/// Nyquist-rate samples, and source_cov is the source covariance on the same
/// time axis, so both bounds share one bookkeeping convention.
struct CrbInputs {
  ArrayGeometry geom;
  std::vector<double> phis;        // spatial phases, radians
  std::vector<int> omega;          // active sub-bands, 1-based, distinct
  SamplingPattern pattern;
  Eigen::MatrixXcd source_cov;     // K x K Hermitian PSD
  double sigma2 = 1.0;             // noise variance, linear
  double snapshots = 1.0;          // Nyquist-rate sample count T
  double nyquist_hz = 1.0;         // f_N, needed for the frequency bounds
};

/// Lower bound on the covariance of unbiased spatial-phase estimators under
/// the sub-Nyquist union reception model. K x K, symmetric positive definite.
Eigen::MatrixXd crb_sub_phase(const CrbInputs& in);

/// The Nyquist-sampling counterpart, driven by the plain array manifold.
Eigen::MatrixXd crb_ny_phase(const CrbInputs& in);

enum class FrequencyCrbMode { Sub, Nyquist };

/// Large-sample per-source frequency bounds in Hz^2. The sub-Nyquist bound
/// carries the extra factor L / P, the Nyquist one does not.
Eigen::VectorXd crb_frequency(const CrbInputs& in, FrequencyCrbMode mode);

/// Single-source phase-estimation floor 6 / (snr * T * M (M^2 - 1)).
double single_source_phase_floor(double snr_linear, double snapshots, int sensors);

/// Normalized cross-correlation of the mixing-matrix columns: entry (i, j)
/// is |b_i^H b_j| / (||b_i|| ||b_j||), so the diagonal is exactly one. An
/// off-diagonal entry of one flags a pattern that cannot separate those two
/// sub-bands (always the case for P = 1).
Eigen::MatrixXd coset_column_correlation(const ModulationMatrix& b);

}  // namespace subnyq
