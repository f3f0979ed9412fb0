#include "subnyq/crb.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace subnyq {

namespace {

void check_inputs(const CrbInputs& in) {
  const std::size_t k = in.phis.size();
  if (k == 0) throw std::invalid_argument("crb: need at least one source");
  if (in.omega.size() != k) throw std::invalid_argument("crb: phis/omega size mismatch");
  if (in.source_cov.rows() != static_cast<Eigen::Index>(k) ||
      in.source_cov.cols() != static_cast<Eigen::Index>(k)) {
    throw std::invalid_argument("crb: source covariance must be K x K");
  }
  if (!(in.sigma2 > 0.0)) throw std::invalid_argument("crb: sigma2 must be positive");
  if (!(in.snapshots > 0.0)) throw std::invalid_argument("crb: snapshot count must be positive");
}

[[noreturn]] void throw_collision(const Eigen::MatrixXcd& base) {
  // name the closest column pair so the failure is actionable
  const Eigen::Index k = base.cols();
  int bi = 0, bj = 1;
  double best = -1.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const double c = std::abs(base.col(i).dot(base.col(j))) /
                       (base.col(i).norm() * base.col(j).norm());
      if (c > best) {
        best = c;
        bi = static_cast<int>(i);
        bj = static_cast<int>(j);
      }
    }
  }
  throw std::invalid_argument(
      "crb: steering matrix is rank deficient, sources " + std::to_string(bi) +
      " and " + std::to_string(bj) + " collide");
}

// (sigma2 / 2T) * (Re[(V^H P W) . conj(Rs)])^{-1} with P the projector onto
// the orthogonal complement of range(base). Shared by both phase bounds.
Eigen::MatrixXd fisher_style_bound(const Eigen::MatrixXcd& base,
                                   const Eigen::MatrixXcd& deriv,
                                   const Eigen::MatrixXcd& source_cov,
                                   double sigma2, double snapshots) {
  const Eigen::Index k = base.cols();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(base);
  if (qr.rank() < k) throw_collision(base);

  const Eigen::MatrixXcd gram = base.adjoint() * base;
  const Eigen::MatrixXcd cross = base.adjoint() * deriv;                  // K x K
  const Eigen::MatrixXcd projected =
      deriv.adjoint() * deriv - cross.adjoint() * gram.ldlt().solve(cross);

  const Eigen::MatrixXd fisher =
      projected.cwiseProduct(source_cov.adjoint()).real();
  const Eigen::MatrixXd bound =
      (sigma2 / (2.0 * snapshots)) * fisher.inverse();

  // a collision too mild for the rank test still wrecks the inversion;
  // a valid bound is positive definite, so catch the fallout here
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(bound(i, i) > 0.0) || !std::isfinite(bound(i, i))) throw_collision(base);
  }
  return 0.5 * (bound + bound.transpose());
}

}  // namespace

Eigen::MatrixXd crb_sub_phase(const CrbInputs& in) {
  check_inputs(in);
  const ModulationMatrix b = modulation_matrix(in.pattern);
  const int k = static_cast<int>(in.phis.size());

  Eigen::MatrixXcd d(in.geom.size(), k);
  for (int i = 0; i < k; ++i) {
    d.col(i) = steering_derivative(in.geom, in.phis[static_cast<std::size_t>(i)]);
  }
  const ReceptionModel model = reception_matrix(in.geom, in.phis, b, in.omega);

  // derivative of the union steering columns: D_k (x) B[:, l_k]
  Eigen::MatrixXcd e(model.g.rows(), k);
  const int p = b.branches();
  for (int i = 0; i < k; ++i) {
    const Eigen::VectorXcd col = b.column(in.omega[static_cast<std::size_t>(i)]);
    for (int m = 0; m < in.geom.size(); ++m) {
      e.block(static_cast<Eigen::Index>(m) * p, i, p, 1) = d(m, i) * col;
    }
  }
  return fisher_style_bound(model.g, e, in.source_cov, in.sigma2, in.snapshots);
}

Eigen::MatrixXd crb_ny_phase(const CrbInputs& in) {
  check_inputs(in);
  const int k = static_cast<int>(in.phis.size());
  Eigen::MatrixXcd a(in.geom.size(), k), d(in.geom.size(), k);
  for (int i = 0; i < k; ++i) {
    a.col(i) = steering_vector(in.geom, in.phis[static_cast<std::size_t>(i)]);
    d.col(i) = steering_derivative(in.geom, in.phis[static_cast<std::size_t>(i)]);
  }
  return fisher_style_bound(a, d, in.source_cov, in.sigma2, in.snapshots);
}

Eigen::VectorXd crb_frequency(const CrbInputs& in, FrequencyCrbMode mode) {
  check_inputs(in);
  const int k = static_cast<int>(in.phis.size());
  const double t = in.snapshots;
  const double fn2 = in.nyquist_hz * in.nyquist_hz;
  const double ratio = static_cast<double>(in.pattern.reduction()) /
                       static_cast<double>(in.pattern.branches());

  Eigen::VectorXd out(k);
  for (int i = 0; i < k; ++i) {
    const double snr = std::real(in.source_cov(i, i)) / in.sigma2;
    double v = (6.0 / (4.0 * kPi * kPi)) / snr / in.geom.size() * fn2 / (t * t * t);
    if (mode == FrequencyCrbMode::Sub) v *= ratio;
    out(i) = v;
  }
  return out;
}

double single_source_phase_floor(double snr_linear, double snapshots, int sensors) {
  const double m = static_cast<double>(sensors);
  return 6.0 / (snr_linear * snapshots * m * (m * m - 1.0));
}

Eigen::MatrixXd coset_column_correlation(const ModulationMatrix& b) {
  const int l = b.reduction();
  Eigen::MatrixXd delta(l, l);
  for (int i = 0; i < l; ++i) {
    delta(i, i) = 1.0;
    for (int j = i + 1; j < l; ++j) {
      const double c = std::abs(b.b.col(i).dot(b.b.col(j))) /
                       (b.b.col(i).norm() * b.b.col(j).norm());
      delta(i, j) = delta(j, i) = c;
    }
  }
  return delta;
}

}  // namespace subnyq
