#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "subnyq/array.hpp"
#include "subnyq/common.hpp"
#include "subnyq/signal.hpp"

namespace subnyq {

/// Coset selection for the sampler bank: P offsets out of every block of L
/// Nyquist-grid samples. Offsets are 0-based, strictly increasing, < L.
class SamplingPattern {
 public:
  SamplingPattern(int reduction, std::vector<int> cosets);

  /// C = [0, 1, ..., P-1].
  static SamplingPattern first(int reduction, int branches);

  /// Uniform P-subset of {0..L-1}, redrawn until the pattern can tell all
  /// sub-bands apart (see subband_identifiable). P = 1 and P = L are passed
  /// through unchanged.
  static SamplingPattern random(int reduction, int branches, std::mt19937_64& rng);

  int reduction() const { return reduction_; }            // L
  int branches() const { return static_cast<int>(cosets_.size()); }  // P
  const std::vector<int>& cosets() const { return cosets_; }

  /// True when distinct sub-bands map to distinct modulation columns, i.e.
  /// gcd(L, {c_p - c_0}) == 1. Fails for P = 1 and for patterns whose offsets
  /// all share a residue class, which alias pairs of sub-bands onto each
  /// other.
  bool subband_identifiable() const;

  double average_rate(double f_nyquist) const {
    return branches() * f_nyquist / reduction();
  }

 private:
  int reduction_;
  std::vector<int> cosets_;
};

/// P x L mixing matrix of the sampler bank. Entry (i, l) is
/// (1/sqrt(L)) exp(j (2 pi / L) c_i l) with the column exponent l running
/// 1..L, so column l belongs to sub-band l covering [(l-1) f_sub, l f_sub).
/// Rows are orthonormal for every valid pattern. The generating coset set
/// rides along; the estimators need its mean to undo the bank's average
/// sampling-offset delay.
struct ModulationMatrix {
  Eigen::MatrixXcd b;       // P x L
  std::vector<int> cosets;  // the pattern that built this matrix

  int branches() const { return static_cast<int>(b.rows()); }
  int reduction() const { return static_cast<int>(b.cols()); }
  Eigen::VectorXcd column(int subband) const { return b.col(subband - 1); }
  double mean_coset() const;
};

ModulationMatrix modulation_matrix(const SamplingPattern& pattern);

/// Per-branch sub-Nyquist streams; row m*P + p holds sensor m, branch p.
struct CosetStreams {
  int sensors = 0;
  int branches = 0;
  Eigen::MatrixXcd x;  // (M*P) x (T/L)

  Eigen::Index length() const { return x.cols(); }
};

/// stream[m][p][n] = record[m][n*L + c_p].
CosetStreams multicoset_sample(const NyquistRecord& record,
                               const SamplingPattern& pattern);

/// Frequency-domain snapshots: one unitary DFT per stream, clock-aligned so
/// the bank obeys the mixing-matrix model. Row ordering is m*P + p, matching
/// the Kronecker structure a(phi) (x) B column.
struct SnapshotSet {
  int sensors = 0;
  int branches = 0;
  double f_sub = 0.0;   // stream rate, Hz
  Eigen::MatrixXcd y;   // (M*P) x N

  Eigen::Index count() const { return y.cols(); }
  double bin_width() const { return f_sub / static_cast<double>(y.cols()); }
  /// Frequency of bin q (0-based) within the sub-band, in [0, f_sub).
  double bin_frequency(Eigen::Index q) const {
    return f_sub * static_cast<double>(q) / static_cast<double>(y.cols());
  }
};

/// Transforms every stream with a unitary DFT referenced to the common
/// Nyquist clock: bin q of branch p carries the alignment phase
/// exp(j (2 pi / L) c_p (1 - q/N)), which compensates the branch's sampling
/// offset and matches the 1-based column convention of the mixing matrix.
SnapshotSet assemble_snapshots(const CosetStreams& streams,
                               const SamplingPattern& pattern, double f_nyquist);

/// Union-domain steering matrix restricted to the active sub-bands.
struct ReceptionModel {
  Eigen::MatrixXcd g;         // (M*P) x K, column k = a(phi_k) (x) B[:, l_k]
  std::vector<int> support;   // S_k = (k-1) L + l_k, 1-based
  std::vector<int> omega;     // active sub-band per source, 1-based
};

ReceptionModel reception_matrix(const ArrayGeometry& geom,
                                const std::vector<double>& phis,
                                const ModulationMatrix& b,
                                const std::vector<int>& omega);

}  // namespace subnyq
