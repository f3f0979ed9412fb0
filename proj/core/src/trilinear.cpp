#include "subnyq/trilinear.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace subnyq {

namespace {

Eigen::MatrixXcd random_factor(Eigen::Index rows, Eigen::Index cols,
                               std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      m(i, j) = cd(gauss(rng), gauss(rng));
    }
  }
  return m;
}

// Column-wise Kronecker product of the spatial and branch factors; row
// layout m*P + p matches the snapshot matrix.
Eigen::MatrixXcd kron_columns(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const Eigen::Index m = a.rows(), p = b.rows(), k = a.cols();
  Eigen::MatrixXcd out(m * p, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index im = 0; im < m; ++im) {
      out.block(im * p, j, p, 1) = a(im, j) * b.col(j);
    }
  }
  return out;
}

// Ridge solve of X * G = W for X, with G Hermitian positive definite.
Eigen::MatrixXcd ridge_solve(const Eigen::MatrixXcd& w, const Eigen::MatrixXcd& gram) {
  return gram.transpose().ldlt().solve(w.transpose()).transpose();
}

}  // namespace

TrilinearFactors rals_decompose(const Eigen::MatrixXcd& y, int sensors,
                                int branches, int rank, const RalsOptions& opts) {
  const Eigen::Index mp = y.rows();
  const Eigen::Index n = y.cols();
  if (mp != static_cast<Eigen::Index>(sensors) * branches) {
    throw std::invalid_argument("rals_decompose: row count must equal sensors*branches");
  }
  if (rank < 1 || rank > mp) {
    throw std::invalid_argument("rals_decompose: rank out of range");
  }
  if (!(opts.tol > 0.0)) throw std::invalid_argument("rals_decompose: tol must be positive");

  const double ynorm2 = y.squaredNorm();
  const double ynorm = std::sqrt(ynorm2);
  const double lambda =
      opts.lambda >= 0.0
          ? opts.lambda
          : 1e-6 * ynorm2 / (static_cast<double>(mp) * static_cast<double>(n));

  const Eigen::MatrixXcd ident =
      lambda * Eigen::MatrixXcd::Identity(rank, rank);

  TrilinearFactors best;
  best.final_residual = std::numeric_limits<double>::infinity();
  best.uniqueness_warning =
      rank >= 2 && std::min(sensors, rank) + std::min(branches, rank) +
                           std::min<int>(static_cast<int>(n), rank) <
                       2 * rank + 2;

  for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
    std::mt19937_64 rng(mix_seed({opts.seed, static_cast<std::uint64_t>(restart)}));
    Eigen::MatrixXcd a = random_factor(sensors, rank, rng);
    Eigen::MatrixXcd b = random_factor(branches, rank, rng);
    Eigen::MatrixXcd c = random_factor(n, rank, rng);

    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(opts.max_iters));
    double prev_res = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iters = 0;
    double res = ynorm;

    for (int it = 0; it < opts.max_iters; ++it) {
      ++iters;

      // mode A: W(m,k) = sum_{p,q} Y[(m,p),q] conj(B(p,k) C(q,k))
      {
        Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(sensors, rank);
        for (Eigen::Index q = 0; q < n; ++q) {
          Eigen::Map<const Eigen::MatrixXcd> slab(y.col(q).data(), branches, sensors);
          w.noalias() +=
              (slab.transpose() * b.conjugate()) * c.row(q).conjugate().asDiagonal();
        }
        const Eigen::MatrixXcd gram =
            ((c.adjoint() * c).cwiseProduct(b.adjoint() * b)).conjugate() + ident;
        a = ridge_solve(w, gram);
      }

      // mode B
      {
        Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(branches, rank);
        for (Eigen::Index q = 0; q < n; ++q) {
          Eigen::Map<const Eigen::MatrixXcd> slab(y.col(q).data(), branches, sensors);
          w.noalias() += (slab * a.conjugate()) * c.row(q).conjugate().asDiagonal();
        }
        const Eigen::MatrixXcd gram =
            ((c.adjoint() * c).cwiseProduct(a.adjoint() * a)).conjugate() + ident;
        b = ridge_solve(w, gram);
      }

      // mode C
      Eigen::MatrixXcd ab = kron_columns(a, b);
      {
        const Eigen::MatrixXcd w = (ab.adjoint() * y).transpose();
        const Eigen::MatrixXcd gram =
            ((b.adjoint() * b).cwiseProduct(a.adjoint() * a)).conjugate() + ident;
        c = ridge_solve(w, gram);
      }

      // rebalance column scales; the balanced split minimizes the norm
      // penalty for a fixed product, so the objective cannot rise here
      for (Eigen::Index j = 0; j < rank; ++j) {
        const double na = a.col(j).norm(), nb = b.col(j).norm(), nc = c.col(j).norm();
        if (na > 0.0 && nb > 0.0 && nc > 0.0) {
          const double s = std::cbrt(na * nb * nc);
          a.col(j) *= s / na;
          b.col(j) *= s / nb;
          c.col(j) *= s / nc;
        }
      }

      ab = kron_columns(a, b);
      res = (y - ab * c.transpose()).norm();
      history.push_back(res * res + lambda * (a.squaredNorm() + b.squaredNorm() +
                                              c.squaredNorm()));

      if (std::isfinite(prev_res) &&
          std::abs(prev_res - res) <= opts.tol * std::max(prev_res, 1e-300)) {
        converged = true;
        break;
      }
      prev_res = res;
    }

    if (res < best.final_residual) {
      best.a = a;
      best.b = b;
      best.s = c.transpose();
      best.iterations = iters;
      best.final_residual = res;
      best.converged = converged;
      best.objective_history = std::move(history);
    }
    // a machine-tight fit will not improve with more restarts
    if (best.converged && best.final_residual <= 1e-12 * std::max(ynorm, 1.0)) break;
  }
  return best;
}

std::vector<int> match_cosets(const Eigen::MatrixXcd& b_factor,
                              const ModulationMatrix& b) {
  const int k = static_cast<int>(b_factor.cols());
  const int l = b.reduction();
  if (b_factor.rows() != b.b.rows()) {
    throw std::invalid_argument("match_cosets: branch dimension mismatch");
  }
  if (k > l) throw std::invalid_argument("match_cosets: more columns than sub-bands");

  Eigen::MatrixXd score(k, l);
  for (int ik = 0; ik < k; ++ik) {
    const double nf = b_factor.col(ik).norm();
    if (nf == 0.0) throw std::invalid_argument("match_cosets: zero factor column");
    for (int il = 0; il < l; ++il) {
      score(ik, il) =
          std::abs(b_factor.col(ik).dot(b.b.col(il))) / (nf * b.b.col(il).norm());
    }
  }

  std::vector<int> omega(static_cast<std::size_t>(k), 0);
  std::vector<bool> col_used(static_cast<std::size_t>(k), false);
  std::vector<bool> band_used(static_cast<std::size_t>(l), false);
  for (int round = 0; round < k; ++round) {
    int best_k = -1, best_l = -1;
    double best = -1.0;
    for (int ik = 0; ik < k; ++ik) {
      if (col_used[static_cast<std::size_t>(ik)]) continue;
      for (int il = 0; il < l; ++il) {
        if (band_used[static_cast<std::size_t>(il)]) continue;
        if (score(ik, il) > best) {
          best = score(ik, il);
          best_k = ik;
          best_l = il;
        }
      }
    }
    col_used[static_cast<std::size_t>(best_k)] = true;
    band_used[static_cast<std::size_t>(best_l)] = true;
    omega[static_cast<std::size_t>(best_k)] = best_l + 1;
  }
  return omega;
}

EstimationResult estimate_from_factors(const TrilinearFactors& factors,
                                       const ModulationMatrix& b,
                                       const ArrayGeometry& geom, double f_sub,
                                       double spacing) {
  const int k = static_cast<int>(factors.a.cols());
  const int l = b.reduction();
  const double f_nyquist = f_sub * l;
  const auto omega = match_cosets(factors.b, b);

  EstimationResult out;
  out.algorithm = "jdftd";
  out.iterations = factors.iterations;
  out.degraded = !factors.converged;

  const Eigen::Index n = factors.s.cols();
  for (int ik = 0; ik < k; ++ik) {
    SourceEstimate est;
    est.phi_hat = ml_phase(factors.a.col(ik), geom);

    const double fbar = folded_tone_frequency(factors.s.row(ik).transpose(), f_sub,
                                              l, b.mean_coset());
    int band = resolve_band_edge(omega[static_cast<std::size_t>(ik)], fbar, f_sub, n);
    if (band != omega[static_cast<std::size_t>(ik)]) {
      // edge reassignment only when it does not collide with another source
      for (int j = 0; j < k; ++j) {
        if (j != ik && omega[static_cast<std::size_t>(j)] == band) {
          band = omega[static_cast<std::size_t>(ik)];
          break;
        }
      }
    }
    est.omega_hat = band;
    est.fbar_hat = fbar;
    est.f_hat = (band - 1) * f_sub + fbar;
    est.theta_hat =
        theta_from_phase(est.phi_hat, est.f_hat, f_nyquist, spacing, &est.theta_clamped);
    out.sources.push_back(est);
  }
  std::sort(out.sources.begin(), out.sources.end(),
            [](const SourceEstimate& x, const SourceEstimate& y) {
              return x.f_hat < y.f_hat;
            });
  return out;
}

EstimationResult jdftd(const SnapshotSet& snaps, const ModulationMatrix& b,
                       const ArrayGeometry& geom, int num_sources,
                       const RalsOptions& opts, double spacing) {
  const TrilinearFactors factors =
      rals_decompose(snaps.y, snaps.sensors, snaps.branches, num_sources, opts);
  EstimationResult out = estimate_from_factors(factors, b, geom, snaps.f_sub, spacing);
  const double ynorm = snaps.y.norm();
  out.residual = ynorm > 0.0 ? factors.final_residual / ynorm : 0.0;
  return out;
}

}  // namespace subnyq
