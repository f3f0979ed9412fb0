#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "subnyq/estimators.hpp"
#include "subnyq/multicoset.hpp"

namespace subnyq {

struct RalsOptions {
  int max_iters = 500;
  double tol = 1e-8;        // relative residual change per sweep
  double lambda = -1.0;     // Tikhonov weight; negative = 1e-6 ||Y||^2 / (MPN)
  int restarts = 3;         // independent random initializations
  std::uint64_t seed = 0x5eedULL;
};

/// Rank-K factors of the sensor x branch x snapshot tensor. Columns come
/// back in arbitrary permutation and scale, as usual for this factorization.
struct TrilinearFactors {
  Eigen::MatrixXcd a;   // M x K
  Eigen::MatrixXcd b;   // P x K
  Eigen::MatrixXcd s;   // K x N
  int iterations = 0;
  double final_residual = 0.0;             // Frobenius norm of the data misfit
  bool converged = false;
  bool uniqueness_warning = false;         // Kruskal-style condition violated
  std::vector<double> objective_history;   // regularized objective per sweep
};

/// Regularized alternating least squares fit of the rank-K model
///   Y[(m,p), q] ~ sum_k A(m,k) B(p,k) S(k,q)
/// on the snapshot matrix (rows ordered m*P + p). Each mode update solves a
/// ridge-regularized least-squares problem; column scales are rebalanced
/// between sweeps. Deterministic for a fixed option set.
TrilinearFactors rals_decompose(const Eigen::MatrixXcd& y, int sensors,
                                int branches, int rank,
                                const RalsOptions& opts = {});

/// Sub-band identification: for every factor column pick the mixing-matrix
/// column with the largest normalized correlation, assigning greedily in
/// decreasing score order so each sub-band is used at most once. Ties break
/// toward the smaller index.
std::vector<int> match_cosets(const Eigen::MatrixXcd& b_factor,
                              const ModulationMatrix& b);

/// Parameter extraction shared by the trilinear path and tests: phases from
/// the spatial factor, sub-bands from the branch factor, folded frequencies
/// from the inverse-transformed snapshot factor rows.
EstimationResult estimate_from_factors(const TrilinearFactors& factors,
                                       const ModulationMatrix& b,
                                       const ArrayGeometry& geom, double f_sub,
                                       double spacing = 1.0);

/// Trilinear-decomposition joint estimator.
EstimationResult jdftd(const SnapshotSet& snaps, const ModulationMatrix& b,
                       const ArrayGeometry& geom, int num_sources,
                       const RalsOptions& opts = {}, double spacing = 1.0);

}  // namespace subnyq
