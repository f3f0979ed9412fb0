#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "subnyq/estimators.hpp"
#include "subnyq/multicoset.hpp"

namespace subnyq {

struct CovarianceEstimate {
  Eigen::MatrixXcd r;       // (M*P) x (M*P), Hermitian
  Eigen::Index snapshots_used = 0;
};

/// R = (1/N) sum_q Y(q) Y(q)^H over all snapshot bins.
CovarianceEstimate sample_covariance(const SnapshotSet& snaps);

/// Orthonormal basis of the noise subspace: the eigenvectors belonging to
/// the MP-K smallest eigenvalues. Sets *degenerate_gap when the K-th
/// eigenvalue gap is too small to separate signal from noise reliably.
Eigen::MatrixXcd noise_subspace(const CovarianceEstimate& cov, int num_sources,
                                bool* degenerate_gap = nullptr);

/// Joint (sub-band, phase) spectrum: values(l-1, g) = 1 / ||a_l(phi_g)^H U_N||^2
/// with a_l(phi) = a(phi) (x) B[:, l].
struct PseudoSpectrum {
  Eigen::VectorXd grid_phi;   // G phase samples over [-pi, pi)
  Eigen::MatrixXd values;     // L x G, strictly positive
};

PseudoSpectrum pseudo_spectrum(const Eigen::MatrixXcd& noise_basis,
                               const ModulationMatrix& b, const ArrayGeometry& geom,
                               int grid_points = 4096);

struct PseudoPeak {
  int subband = 0;     // 1-based
  double phi = 0.0;
  double value = 0.0;  // spectrum height at the refined location
};

/// Raised when the spectrum is flat or carries fewer than the requested
/// number of peaks in distinct sub-bands; the peaks located so far ride along.
class peak_search_error : public std::runtime_error {
 public:
  peak_search_error(const std::string& what, std::vector<PseudoPeak> partial)
      : std::runtime_error(what), found(std::move(partial)) {}
  std::vector<PseudoPeak> found;
};

/// Top num_sources spectrum peaks under the distinct sub-band constraint.
/// Each phase is refined by parabolic interpolation on the log spectrum and
/// a golden-section polish of the exact spectrum.
std::vector<PseudoPeak> pseudo_spectrum_peaks(const Eigen::MatrixXcd& noise_basis,
                                              const ModulationMatrix& b,
                                              const ArrayGeometry& geom,
                                              int num_sources,
                                              int grid_points = 4096);

/// Subspace-decomposition joint estimator: covariance, noise subspace, joint
/// peak search, least-squares source recovery, and the shared tone pipeline
/// for folded frequency, carrier, and direction. A deflation pass then
/// re-fits each source against the exact continuous-frequency response,
/// which removes the sub-band quantization floor and untangles tones that
/// sit on a band boundary.
EstimationResult jdfsd(const SnapshotSet& snaps, const ModulationMatrix& b,
                       const ArrayGeometry& geom, int num_sources,
                       int grid_points = 4096, double spacing = 1.0);

}  // namespace subnyq
