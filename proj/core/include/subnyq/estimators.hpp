#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "subnyq/array.hpp"
#include "subnyq/common.hpp"

namespace subnyq {

/// Maximum-likelihood frequency of a single complex tone: the location of
/// the periodogram peak over [0, 2pi), found on an 8x zero-padded transform
/// grid and polished by golden-section search. Returns radians per sample.
double periodogram_ml_tone(const Eigen::VectorXcd& z);

/// Maximum-likelihood spatial phase for an arbitrary geometry: argmax over
/// phi in [-pi, pi) of |a(phi)^H z|, dense grid plus golden-section polish.
double ml_phase(const Eigen::VectorXcd& z, const ArrayGeometry& geom);

/// Carrier reconstruction from the sub-band index and the folded frequency:
/// f = (subband - 1) * f_nyquist / L + folded.
double unfold_frequency(int subband, double folded, double f_nyquist, int reduction);

/// Inverts the spatial phase to a direction of arrival. A phase pushed past
/// the visible region by noise is clamped to +-90 degrees and reported via
/// the flag. f must be positive, otherwise the direction is unobservable.
double theta_from_phase(double phi, double f, double f_nyquist, double spacing,
                        bool* clamped = nullptr);

/// Folded frequency of a recovered per-source snapshot row: undoes the
/// bank's average sampling-offset delay (a linear phase of slope
/// mean_coset / L across the bins), inverse-transforms, and locates the tone
/// by periodogram. Returns f in [0, f_sub).
double folded_tone_frequency(const Eigen::VectorXcd& spectrum_row, double f_sub,
                             int reduction, double mean_coset);

/// A tone within half a bin of the top of a sub-band aliases into the next
/// band's bottom bin, so a band estimate paired with a near-top folded
/// frequency really describes the band below. Returns the decoded band.
int resolve_band_edge(int subband, double folded, double f_sub, Eigen::Index bins);

struct SourceEstimate {
  double phi_hat = 0.0;     // spatial phase, radians
  int omega_hat = 0;        // sub-band index, 1-based
  double fbar_hat = 0.0;    // folded frequency, Hz in [0, f_sub)
  double f_hat = 0.0;       // carrier, Hz
  double theta_hat = 0.0;   // direction of arrival, radians
  bool theta_clamped = false;
};

struct EstimationResult {
  std::vector<SourceEstimate> sources;  // sorted by f_hat
  std::string algorithm;
  double residual = 0.0;    // relative model fit residual
  int iterations = 0;
  bool degraded = false;    // convergence / conditioning trouble
  double condition = 0.0;   // cond of the recovery matrix where applicable
};

}  // namespace subnyq
