#include "subnyq/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "subnyq/fft.hpp"

namespace subnyq {

CovarianceEstimate sample_covariance(const SnapshotSet& snaps) {
  const Eigen::Index n = snaps.count();
  if (n < 1) throw std::invalid_argument("sample_covariance: no snapshots");
  CovarianceEstimate out;
  out.snapshots_used = n;
  out.r = (snaps.y * snaps.y.adjoint()) / static_cast<double>(n);
  out.r = 0.5 * (out.r + out.r.adjoint()).eval();  // scrub roundoff skew
  return out;
}

Eigen::MatrixXcd noise_subspace(const CovarianceEstimate& cov, int num_sources,
                                bool* degenerate_gap) {
  const Eigen::Index dim = cov.r.rows();
  if (num_sources < 0 || num_sources >= dim) {
    throw std::invalid_argument("noise_subspace: need 0 <= K < MP");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(cov.r);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("noise_subspace: eigendecomposition failed");
  }
  const Eigen::Index noise_dim = dim - num_sources;
  if (degenerate_gap != nullptr) {
    *degenerate_gap = false;
    if (num_sources > 0) {
      const double top_noise = eig.eigenvalues()(noise_dim - 1);
      const double low_signal = eig.eigenvalues()(noise_dim);
      const double floor = 1e-12 * std::abs(eig.eigenvalues().sum());
      *degenerate_gap = low_signal <= 1.5 * top_noise + floor;
    }
  }
  return eig.eigenvectors().leftCols(noise_dim);
}

namespace {

// Spectrum denominators are evaluated through the projector W = U_N U_N^H
// collapsed per sub-band to the M x M form
//   Q_l(i, j) = b_l^H W[i, j] b_l,
// so one grid point costs M^2 work instead of MP(MP-K).
std::vector<Eigen::MatrixXcd> collapse_projector(const Eigen::MatrixXcd& noise_basis,
                                                 const ModulationMatrix& b, int sensors) {
  const int p = b.branches();
  const int l = b.reduction();
  const Eigen::MatrixXcd w = noise_basis * noise_basis.adjoint();

  std::vector<Eigen::MatrixXcd> q(static_cast<std::size_t>(l));
  for (int band = 0; band < l; ++band) {
    const Eigen::VectorXcd col = b.b.col(band);
    Eigen::MatrixXcd qb(sensors, sensors);
    for (int i = 0; i < sensors; ++i) {
      for (int j = 0; j < sensors; ++j) {
        qb(i, j) = col.dot(w.block(static_cast<Eigen::Index>(i) * p,
                                   static_cast<Eigen::Index>(j) * p, p, p) *
                           col);
      }
    }
    q[static_cast<std::size_t>(band)] = std::move(qb);
  }
  return q;
}

double denom_at(const Eigen::MatrixXcd& q, const ArrayGeometry& geom, double phi) {
  const Eigen::VectorXcd a = steering_vector(geom, phi);
  const double v = std::real(a.dot(q * a));  // a^H Q a
  return std::max(v, 0.0);
}

constexpr double kFloor = 1e-300;

}  // namespace

PseudoSpectrum pseudo_spectrum(const Eigen::MatrixXcd& noise_basis,
                               const ModulationMatrix& b, const ArrayGeometry& geom,
                               int grid_points) {
  if (grid_points < 8) throw std::invalid_argument("pseudo_spectrum: grid too small");
  const int l = b.reduction();
  const auto q = collapse_projector(noise_basis, b, geom.size());

  PseudoSpectrum out;
  out.grid_phi.resize(grid_points);
  out.values.resize(l, grid_points);
  const double step = kTwoPi / grid_points;
  for (int g = 0; g < grid_points; ++g) {
    const double phi = -kPi + step * g;
    out.grid_phi(g) = phi;
    const Eigen::VectorXcd a = steering_vector(geom, phi);
    for (int band = 0; band < l; ++band) {
      const double d = std::real(a.dot(q[static_cast<std::size_t>(band)] * a));
      out.values(band, g) = 1.0 / std::max(d, kFloor);
    }
  }
  return out;
}

std::vector<PseudoPeak> pseudo_spectrum_peaks(const Eigen::MatrixXcd& noise_basis,
                                              const ModulationMatrix& b,
                                              const ArrayGeometry& geom,
                                              int num_sources, int grid_points) {
  if (num_sources < 1) throw std::invalid_argument("pseudo_spectrum_peaks: need K >= 1");
  const int l = b.reduction();
  const auto spec = pseudo_spectrum(noise_basis, b, geom, grid_points);
  const auto q = collapse_projector(noise_basis, b, geom.size());
  const int g_count = grid_points;
  const double step = kTwoPi / g_count;

  const double vmax = spec.values.maxCoeff();
  const double vmin = spec.values.minCoeff();
  if (!((vmax - vmin) / vmax > 1e-9)) {
    throw peak_search_error("pseudo_spectrum_peaks: spectrum is flat", {});
  }

  struct Candidate {
    double value;
    int band;  // 0-based here
    int g;
  };
  std::vector<Candidate> candidates;
  for (int band = 0; band < l; ++band) {
    for (int g = 0; g < g_count; ++g) {
      const double v = spec.values(band, g);
      const double prev = spec.values(band, (g + g_count - 1) % g_count);
      const double next = spec.values(band, (g + 1) % g_count);
      if (v > prev && v >= next) candidates.push_back({v, band, g});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& c) { return a.value > c.value; });

  std::vector<PseudoPeak> peaks;
  std::vector<bool> band_used(static_cast<std::size_t>(l), false);
  for (const Candidate& cand : candidates) {
    if (static_cast<int>(peaks.size()) == num_sources) break;
    if (band_used[static_cast<std::size_t>(cand.band)]) continue;
    band_used[static_cast<std::size_t>(cand.band)] = true;

    // parabolic vertex on the log spectrum, then polish on the exact one
    const double ym = std::log(spec.values(cand.band, (cand.g + g_count - 1) % g_count));
    const double y0 = std::log(spec.values(cand.band, cand.g));
    const double yp = std::log(spec.values(cand.band, (cand.g + 1) % g_count));
    double offset = 0.0;
    const double curv = ym - 2.0 * y0 + yp;
    if (curv < 0.0) offset = 0.5 * (ym - yp) / curv;
    offset = std::clamp(offset, -1.0, 1.0);
    double phi = spec.grid_phi(cand.g) + offset * step;

    const Eigen::MatrixXcd& qb = q[static_cast<std::size_t>(cand.band)];
    constexpr double inv_phi_ratio = 0.6180339887498949;
    double a_lo = phi - step, a_hi = phi + step;
    double x1 = a_hi - inv_phi_ratio * (a_hi - a_lo);
    double x2 = a_lo + inv_phi_ratio * (a_hi - a_lo);
    double f1 = denom_at(qb, geom, x1), f2 = denom_at(qb, geom, x2);
    while (a_hi - a_lo > 1e-12) {
      if (f1 > f2) {  // minimize the denominator
        a_lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = a_lo + inv_phi_ratio * (a_hi - a_lo);
        f2 = denom_at(qb, geom, x2);
      } else {
        a_hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = a_hi - inv_phi_ratio * (a_hi - a_lo);
        f1 = denom_at(qb, geom, x1);
      }
    }
    phi = 0.5 * (a_lo + a_hi);
    if (phi >= kPi) phi -= kTwoPi;
    if (phi < -kPi) phi += kTwoPi;

    peaks.push_back({cand.band + 1, phi,
                     1.0 / std::max(denom_at(qb, geom, phi), kFloor)});
  }

  if (static_cast<int>(peaks.size()) < num_sources) {
    throw peak_search_error("pseudo_spectrum_peaks: found " +
                                std::to_string(peaks.size()) + " of " +
                                std::to_string(num_sources) + " peaks",
                            std::move(peaks));
  }
  return peaks;
}

namespace {

// Exact snapshot response of a unit tone at (phi, f): the forward chain of
// synthesis, coset sampling, and clock-aligned transform collapsed into a
// Dirichlet kernel. Entry ((m,p), q) is
//   a_m(phi) * exp(j (2pi/L) c_p (f/f_sub + 1 - q/N)) * D_q(f).
struct ToneFit {
  const ArrayGeometry& geom;
  const ModulationMatrix& b;
  double f_sub;
  Eigen::Index n;
  Eigen::MatrixXcd w;  // P x N bin phases exp(-j (2pi/L) c_p q / N)

  ToneFit(const ArrayGeometry& g, const ModulationMatrix& bm, double fsub,
          Eigen::Index bins)
      : geom(g), b(bm), f_sub(fsub), n(bins) {
    const int p = b.branches();
    const int l = b.reduction();
    w.resize(p, n);
    for (int ip = 0; ip < p; ++ip) {
      const double c = b.cosets[static_cast<std::size_t>(ip)];
      for (Eigen::Index q = 0; q < n; ++q) {
        const double ang =
            -kTwoPi / l * c * static_cast<double>(q) / static_cast<double>(n);
        w(ip, q) = cd(std::cos(ang), std::sin(ang));
      }
    }
  }

  Eigen::VectorXcd dirichlet(double f) const {
    const double omega = std::fmod(kTwoPi * f / f_sub, kTwoPi);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::VectorXcd d(n);
    for (Eigen::Index q = 0; q < n; ++q) {
      const double delta = omega - kTwoPi * static_cast<double>(q) / static_cast<double>(n);
      const double sh = std::sin(0.5 * delta);
      double ratio;
      if (std::abs(sh) < 1e-12) {
        ratio = static_cast<double>(n) * std::cos(0.5 * static_cast<double>(n) * delta) /
                std::cos(0.5 * delta);
      } else {
        ratio = std::sin(0.5 * static_cast<double>(n) * delta) / sh;
      }
      d(q) = scale * ratio * std::polar(1.0, 0.5 * delta * static_cast<double>(n - 1));
    }
    return d;
  }

  Eigen::VectorXcd branch_gain(double f) const {
    const int p = b.branches();
    const int l = b.reduction();
    Eigen::VectorXcd h(p);
    for (int ip = 0; ip < p; ++ip) {
      const double c = b.cosets[static_cast<std::size_t>(ip)];
      h(ip) = std::polar(1.0, kTwoPi / l * c * (f / f_sub + 1.0));
    }
    return h;
  }

  Eigen::MatrixXcd response(double phi, double f) const {
    const int m = geom.size();
    const int p = b.branches();
    const Eigen::VectorXcd a = steering_vector(geom, phi);
    const Eigen::VectorXcd h = branch_gain(f);
    const Eigen::VectorXcd d = dirichlet(f);
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(m) * p, n);
    for (int im = 0; im < m; ++im) {
      for (int ip = 0; ip < p; ++ip) {
        out.row(static_cast<Eigen::Index>(im) * p + ip) =
            (a(im) * h(ip)) * (w.row(ip).array() * d.transpose().array()).matrix();
      }
    }
    return out;
  }

  // energy of the unit response; the (m, p) factors are unit modulus
  double response_energy(double f) const {
    return static_cast<double>(geom.size()) * b.branches() * dirichlet(f).squaredNorm();
  }
};

constexpr double kGolden = 0.6180339887498949;

// Golden-section maximization with precomputed end scores.
template <typename F>
double golden_peak(const F& score, double lo, double hi, double tol) {
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = score(x1), f2 = score(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = score(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = score(x1);
    }
  }
  return 0.5 * (lo + hi);
}

struct RefinedSource {
  double phi;
  double f;
};

// Deflation refinement: the sub-band-quantized search model ignores the
// within-bin part of the branch mixing, which floors the accuracy once the
// noise drops below the quantization residue and lets band-edge tones leak
// ghost components into neighboring bands. Cycling over sources, each one is
// re-estimated against the data with all other fitted tones removed, using
// the exact continuous-frequency response; a flat-residual re-detection pass
// rescues sources whose initial peak was stolen by such a ghost.
std::vector<RefinedSource> refine_sources(const SnapshotSet& snaps,
                                          const ModulationMatrix& b,
                                          const ArrayGeometry& geom,
                                          std::vector<RefinedSource> sources,
                                          int grid_points) {
  const int k = static_cast<int>(sources.size());
  const Eigen::Index n = snaps.count();
  const ToneFit fit(geom, b, snaps.f_sub, n);
  const int l = b.reduction();
  const double f_nyquist = snaps.f_sub * l;
  const double bin = snaps.bin_width();

  std::vector<Eigen::MatrixXcd> resp(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    resp[static_cast<std::size_t>(i)] =
        fit.response(sources[static_cast<std::size_t>(i)].phi,
                     sources[static_cast<std::size_t>(i)].f);
  }

  auto inner = [](const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
    return (x.conjugate().array() * y.array()).sum();
  };

  Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(k);
  auto solve_amplitudes = [&]() {
    Eigen::MatrixXcd gram(k, k);
    Eigen::VectorXcd rhs(k);
    for (int i = 0; i < k; ++i) {
      rhs(i) = inner(resp[static_cast<std::size_t>(i)], snaps.y);
      for (int j = 0; j < k; ++j) {
        gram(i, j) = inner(resp[static_cast<std::size_t>(i)],
                           resp[static_cast<std::size_t>(j)]);
      }
    }
    gram += 1e-12 * gram.norm() * Eigen::MatrixXcd::Identity(k, k);
    alpha = gram.ldlt().solve(rhs);
  };
  solve_amplitudes();

  constexpr int kCycles = 2;
  for (int cycle = 0; cycle < kCycles; ++cycle) {
    for (int idx = 0; idx < k; ++idx) {
      Eigen::MatrixXcd residual = snaps.y;
      for (int j = 0; j < k; ++j) {
        if (j != idx) residual -= alpha(j) * resp[static_cast<std::size_t>(j)];
      }

      auto concentrated = [&](double phi, double f) {
        const Eigen::MatrixXcd r = fit.response(phi, f);
        const cd s = inner(r, residual);
        return std::norm(s) / r.squaredNorm();
      };

      RefinedSource best = sources[static_cast<std::size_t>(idx)];
      double best_score = concentrated(best.phi, best.f);

      // global re-detection on the deflated data; rescues stolen peaks.
      // A coarse grid suffices here, the polish below does the fine work.
      if (k > 1) {
        try {
          SnapshotSet res_snaps{snaps.sensors, snaps.branches, snaps.f_sub, residual};
          const auto cov = sample_covariance(res_snaps);
          const auto un = noise_subspace(cov, 1);
          const auto peaks =
              pseudo_spectrum_peaks(un, b, geom, 1, std::min(grid_points, 1024));
          const ReceptionModel one = reception_matrix(geom, {peaks[0].phi}, b,
                                                      {peaks[0].subband});
          const Eigen::VectorXcd row =
              (one.g.adjoint() * residual).transpose() / one.g.squaredNorm();
          const double fbar =
              folded_tone_frequency(row, snaps.f_sub, l, b.mean_coset());
          const int band =
              resolve_band_edge(peaks[0].subband, fbar, snaps.f_sub, n);
          // (band-1) f_sub + fbar covers both readings: in-band content and
          // a top-edge tone that presented one band up
          const double f_glob = std::clamp((band - 1) * snaps.f_sub + fbar, 1.0,
                                           f_nyquist - 1.0);
          const double score = concentrated(peaks[0].phi, f_glob);
          if (score > best_score) {
            best = {peaks[0].phi, f_glob};
            best_score = score;
          }
        } catch (const std::exception&) {
          // flat or empty residual: keep the current estimate
        }
      }

      // coordinate polish on the exact model, wide then narrow
      const double phi_spans[2] = {0.02, 0.002};
      const double f_spans[2] = {1.5 * bin, 0.1 * bin};
      for (int round = 0; round < 2; ++round) {
        {
          const Eigen::VectorXcd h = fit.branch_gain(best.f);
          const Eigen::VectorXcd d = fit.dirichlet(best.f);
          const double energy = fit.response_energy(best.f);
          // per-sensor projections leave a phi-only search
          const int m = geom.size();
          const int p = b.branches();
          Eigen::VectorXcd z(m);
          for (int im = 0; im < m; ++im) {
            cd acc(0, 0);
            for (int ip = 0; ip < p; ++ip) {
              acc += std::conj(h(ip)) *
                     (fit.w.row(ip).conjugate().array() * d.conjugate().transpose().array() *
                      residual.row(static_cast<Eigen::Index>(im) * p + ip).array())
                         .sum();
            }
            z(im) = acc;
          }
          auto phi_score = [&](double phi) {
            cd s(0, 0);
            for (int im = 0; im < m; ++im) {
              s += std::polar(1.0, -phi * geom.positions()[static_cast<std::size_t>(im)]) *
                   z(im);
            }
            return std::norm(s) / energy;
          };
          best.phi = golden_peak(phi_score, best.phi - phi_spans[round],
                                 best.phi + phi_spans[round], 1e-10);
        }
        {
          const int m = geom.size();
          const int p = b.branches();
          const Eigen::VectorXcd a = steering_vector(geom, best.phi);
          Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(p, n);
          for (int im = 0; im < m; ++im) {
            for (int ip = 0; ip < p; ++ip) {
              v.row(ip) += std::conj(a(im)) *
                           residual.row(static_cast<Eigen::Index>(im) * p + ip);
            }
          }
          const Eigen::MatrixXcd wv = fit.w.conjugate().cwiseProduct(v);
          auto f_score = [&](double f) {
            const Eigen::VectorXcd h = fit.branch_gain(f);
            const Eigen::VectorXcd d = fit.dirichlet(f);
            cd s(0, 0);
            for (int ip = 0; ip < p; ++ip) {
              s += std::conj(h(ip)) * (wv.row(ip).array() * d.conjugate().transpose().array()).sum();
            }
            return std::norm(s) /
                   (static_cast<double>(m) * p * d.squaredNorm());
          };
          const double lo = std::max(1.0, best.f - f_spans[round]);
          const double hi = std::min(f_nyquist - 1.0, best.f + f_spans[round]);
          best.f = golden_peak(f_score, lo, hi, 1e-4);
        }
      }

      sources[static_cast<std::size_t>(idx)] = best;
      resp[static_cast<std::size_t>(idx)] = fit.response(best.phi, best.f);
      solve_amplitudes();
    }
  }
  return sources;
}

}  // namespace

EstimationResult jdfsd(const SnapshotSet& snaps, const ModulationMatrix& b,
                       const ArrayGeometry& geom, int num_sources, int grid_points,
                       double spacing) {
  const int l = b.reduction();
  const double f_nyquist = snaps.f_sub * l;

  const CovarianceEstimate cov = sample_covariance(snaps);
  bool degenerate = false;
  const Eigen::MatrixXcd un = noise_subspace(cov, num_sources, &degenerate);
  const auto peaks = pseudo_spectrum_peaks(un, b, geom, num_sources, grid_points);

  std::vector<double> phis;
  std::vector<int> omega;
  for (const PseudoPeak& pk : peaks) {
    phis.push_back(pk.phi);
    omega.push_back(pk.subband);
  }
  const ReceptionModel model = reception_matrix(geom, phis, b, omega);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(model.g);
  const double cond =
      svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);

  // least-squares source recovery, K x N
  const Eigen::MatrixXcd recovered = model.g.colPivHouseholderQr().solve(snaps.y);
  const double ynorm = snaps.y.norm();

  // initial folded frequencies from the recovered rows, with band-edge decode
  std::vector<RefinedSource> initial;
  for (int k = 0; k < num_sources; ++k) {
    const double fbar = folded_tone_frequency(recovered.row(k).transpose(),
                                              snaps.f_sub, l, b.mean_coset());
    int band = resolve_band_edge(omega[static_cast<std::size_t>(k)], fbar,
                                 snaps.f_sub, snaps.count());
    if (band != omega[static_cast<std::size_t>(k)]) {
      // edge reassignment only when it does not collide with another source
      for (int j = 0; j < num_sources; ++j) {
        if (j != k && omega[static_cast<std::size_t>(j)] == band) {
          band = omega[static_cast<std::size_t>(k)];
          break;
        }
      }
    }
    initial.push_back(
        {phis[static_cast<std::size_t>(k)], (band - 1) * snaps.f_sub + fbar});
  }

  const auto refined = refine_sources(snaps, b, geom, initial, grid_points);

  EstimationResult out;
  out.algorithm = "jdfsd";
  out.iterations = 0;
  out.condition = cond;
  out.degraded = degenerate || cond > 1e8;

  for (int k = 0; k < num_sources; ++k) {
    const RefinedSource& src = refined[static_cast<std::size_t>(k)];
    SourceEstimate est;
    est.phi_hat = src.phi;
    est.omega_hat = 1 + static_cast<int>(std::floor(src.f * l / f_nyquist));
    est.omega_hat = std::clamp(est.omega_hat, 1, l);
    est.fbar_hat = src.f - (est.omega_hat - 1) * snaps.f_sub;
    est.f_hat = src.f;
    est.theta_hat =
        theta_from_phase(est.phi_hat, est.f_hat, f_nyquist, spacing, &est.theta_clamped);
    out.sources.push_back(est);
  }

  // refinement must keep sources in distinct bands; fall back to the
  // quantized estimates when two of them merged
  bool collided = false;
  for (int i = 0; i < num_sources && !collided; ++i) {
    for (int j = i + 1; j < num_sources; ++j) {
      if (out.sources[static_cast<std::size_t>(i)].omega_hat ==
          out.sources[static_cast<std::size_t>(j)].omega_hat) {
        collided = true;
        break;
      }
    }
  }
  if (collided) {
    out.degraded = true;
    out.sources.clear();
    for (int k = 0; k < num_sources; ++k) {
      const RefinedSource& src = initial[static_cast<std::size_t>(k)];
      SourceEstimate est;
      est.phi_hat = src.phi;
      est.omega_hat = 1 + static_cast<int>(std::floor(src.f * l / f_nyquist));
      est.omega_hat = std::clamp(est.omega_hat, 1, l);
      est.fbar_hat = src.f - (est.omega_hat - 1) * snaps.f_sub;
      est.f_hat = src.f;
      est.theta_hat = theta_from_phase(est.phi_hat, est.f_hat, f_nyquist, spacing,
                                       &est.theta_clamped);
      out.sources.push_back(est);
    }
  }

  // model-fit residual against the final parameter set
  {
    const ToneFit fit(geom, b, snaps.f_sub, snaps.count());
    const int k = num_sources;
    std::vector<Eigen::MatrixXcd> resp(static_cast<std::size_t>(k));
    Eigen::MatrixXcd gram(k, k);
    Eigen::VectorXcd rhs(k);
    for (int i = 0; i < k; ++i) {
      resp[static_cast<std::size_t>(i)] =
          fit.response(out.sources[static_cast<std::size_t>(i)].phi_hat,
                       out.sources[static_cast<std::size_t>(i)].f_hat);
    }
    for (int i = 0; i < k; ++i) {
      rhs(i) = (resp[static_cast<std::size_t>(i)].conjugate().array() *
                snaps.y.array()).sum();
      for (int j = 0; j < k; ++j) {
        gram(i, j) = (resp[static_cast<std::size_t>(i)].conjugate().array() *
                      resp[static_cast<std::size_t>(j)].array()).sum();
      }
    }
    gram += 1e-12 * gram.norm() * Eigen::MatrixXcd::Identity(k, k);
    const Eigen::VectorXcd alpha = gram.ldlt().solve(rhs);
    Eigen::MatrixXcd recon = Eigen::MatrixXcd::Zero(snaps.y.rows(), snaps.y.cols());
    for (int i = 0; i < k; ++i) recon += alpha(i) * resp[static_cast<std::size_t>(i)];
    out.residual = ynorm > 0.0 ? (snaps.y - recon).norm() / ynorm : 0.0;
  }

  std::sort(out.sources.begin(), out.sources.end(),
            [](const SourceEstimate& a, const SourceEstimate& c) {
              return a.f_hat < c.f_hat;
            });
  return out;
}

}  // namespace subnyq
