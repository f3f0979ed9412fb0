#include "subnyq/estimators.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "subnyq/fft.hpp"

namespace subnyq {

namespace {

// Golden-section maximization on [lo, hi]; assumes the peak is bracketed.
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

double tone_score(const Eigen::VectorXcd& z, double omega) {
  cd acc(0.0, 0.0);
  for (Eigen::Index n = 0; n < z.size(); ++n) {
    acc += z(n) * std::polar(1.0, -omega * static_cast<double>(n));
  }
  return std::abs(acc);
}

}  // namespace

double periodogram_ml_tone(const Eigen::VectorXcd& z) {
  const Eigen::Index n = z.size();
  if (n < 2) throw std::invalid_argument("periodogram_ml_tone: need at least 2 samples");
  if (z.norm() == 0.0) throw std::invalid_argument("periodogram_ml_tone: zero input");

  const std::size_t padded = fft::next_pow2(static_cast<std::size_t>(8 * n));
  std::vector<cd> buf(padded, cd(0.0, 0.0));
  for (Eigen::Index i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] = z(i);
  auto spec = fft::transform(std::move(buf), false);

  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t q = 0; q < padded; ++q) {
    const double mag = std::abs(spec[q]);
    if (mag > best_mag) {
      best_mag = mag;
      best = q;
    }
  }

  const double step = kTwoPi / static_cast<double>(padded);
  const double center = step * static_cast<double>(best);
  auto score = [&](double w) { return tone_score(z, w); };
  double omega = golden_max(score, center - step, center + step, 1e-10 * kTwoPi);

  omega = std::fmod(omega, kTwoPi);
  if (omega < 0.0) omega += kTwoPi;
  if (kTwoPi - omega < 1e-9) omega = 0.0;  // peak straddling the wrap point
  return omega;
}

double ml_phase(const Eigen::VectorXcd& z, const ArrayGeometry& geom) {
  if (geom.size() < 2 || z.size() != geom.size()) {
    throw std::invalid_argument("ml_phase: input length must match the geometry");
  }
  if (z.norm() == 0.0) throw std::invalid_argument("ml_phase: zero input");

  auto score = [&](double phi) {
    cd acc(0.0, 0.0);
    for (int m = 0; m < geom.size(); ++m) {
      acc += std::polar(1.0, -phi * geom.positions()[static_cast<std::size_t>(m)]) * z(m);
    }
    return std::abs(acc);
  };

  constexpr int kGrid = 4096;
  const double step = kTwoPi / kGrid;
  double best_phi = -kPi;
  double best_val = -1.0;
  for (int g = 0; g < kGrid; ++g) {
    const double phi = -kPi + step * g;
    const double v = score(phi);
    if (v > best_val) {
      best_val = v;
      best_phi = phi;
    }
  }

  double phi = golden_max(score, best_phi - step, best_phi + step, 1e-12);
  if (phi >= kPi) phi -= kTwoPi;
  if (phi < -kPi) phi += kTwoPi;
  return phi;
}

double unfold_frequency(int subband, double folded, double f_nyquist, int reduction) {
  if (subband < 1 || subband > reduction) {
    throw std::invalid_argument("unfold_frequency: sub-band index out of range");
  }
  const double f_sub = f_nyquist / reduction;
  if (!(folded >= 0.0 && folded < f_sub)) {
    throw std::invalid_argument("unfold_frequency: folded frequency outside [0, f_sub)");
  }
  return (subband - 1) * f_sub + folded;
}

double theta_from_phase(double phi, double f, double f_nyquist, double spacing,
                        bool* clamped) {
  if (!(f > 0.0)) {
    throw std::invalid_argument("theta_from_phase: direction unobservable at f = 0");
  }
  double s = phi * f_nyquist / (kPi * spacing * f);
  bool hit = false;
  if (s > 1.0) {
    s = 1.0;
    hit = true;
  } else if (s < -1.0) {
    s = -1.0;
    hit = true;
  }
  if (clamped != nullptr) *clamped = hit;
  return std::asin(s);
}

double folded_tone_frequency(const Eigen::VectorXcd& spectrum_row, double f_sub,
                             int reduction, double mean_coset) {
  const Eigen::Index n = spectrum_row.size();
  if (n < 2) throw std::invalid_argument("folded_tone_frequency: need at least 2 bins");

  std::vector<cd> buf(static_cast<std::size_t>(n));
  for (Eigen::Index q = 0; q < n; ++q) {
    const double ang = kTwoPi / reduction * mean_coset * static_cast<double>(q) /
                       static_cast<double>(n);
    buf[static_cast<std::size_t>(q)] =
        spectrum_row(q) * cd(std::cos(ang), std::sin(ang));
  }
  const auto tone = fft::unitary_inverse(std::move(buf));
  Eigen::VectorXcd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = tone[static_cast<std::size_t>(i)];
  return periodogram_ml_tone(z) / kTwoPi * f_sub;
}

int resolve_band_edge(int subband, double folded, double f_sub, Eigen::Index bins) {
  const double half_bin = 0.5 * f_sub / static_cast<double>(bins);
  if (subband > 1 && folded > f_sub - half_bin) return subband - 1;
  return subband;
}

}  // namespace subnyq
