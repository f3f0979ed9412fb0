#include "subnyq/signal.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace subnyq {

SourceEnsemble::SourceEnsemble(std::vector<Source> sources, double f_nyquist,
                               int reduction)
    : sources_(std::move(sources)), f_nyquist_(f_nyquist), reduction_(reduction) {
  if (!(f_nyquist_ > 0.0)) {
    throw std::invalid_argument("SourceEnsemble: f_nyquist must be positive");
  }
  if (reduction_ < 1) {
    throw std::invalid_argument("SourceEnsemble: reduction factor must be >= 1");
  }
  std::set<int> bands;
  for (const Source& s : sources_) {
    if (!(s.f >= 0.0 && s.f < f_nyquist_)) {
      throw std::invalid_argument("SourceEnsemble: carrier must lie in [0, f_nyquist)");
    }
    if (!(std::abs(s.theta) < kPi / 2.0)) {
      throw std::invalid_argument("SourceEnsemble: |theta| must be < pi/2");
    }
    if (!(s.power > 0.0)) {
      throw std::invalid_argument("SourceEnsemble: power must be positive");
    }
    const int l = 1 + static_cast<int>(std::floor(s.f * reduction_ / f_nyquist_));
    if (!bands.insert(l).second) {
      throw std::invalid_argument("SourceEnsemble: two sources share sub-band " +
                                  std::to_string(l));
    }
  }
}

int SourceEnsemble::subband(int k) const {
  const Source& s = sources_.at(static_cast<std::size_t>(k));
  return 1 + static_cast<int>(std::floor(s.f * reduction_ / f_nyquist_));
}

double SourceEnsemble::folded_frequency(int k) const {
  const Source& s = sources_.at(static_cast<std::size_t>(k));
  return s.f - (subband(k) - 1) * f_sub();
}

double SourceEnsemble::mean_power() const {
  if (sources_.empty()) return 1.0;
  double sum = 0.0;
  for (const Source& s : sources_) sum += s.power;
  return sum / static_cast<double>(sources_.size());
}

NyquistRecord synthesize_nyquist(const SourceEnsemble& ensemble,
                                 const ArrayGeometry& geom, Eigen::Index samples,
                                 double snr_db, std::mt19937_64& rng,
                                 double spacing) {
  if (samples <= 0 || samples % ensemble.reduction() != 0) {
    throw std::invalid_argument(
        "synthesize_nyquist: sample count must be a positive multiple of the "
        "reduction factor");
  }
  if (ensemble.count() >= geom.size()) {
    throw std::invalid_argument("synthesize_nyquist: need fewer sources than sensors");
  }

  const int m = geom.size();
  const double t_n = 1.0 / ensemble.f_nyquist();

  NyquistRecord rec;
  rec.t_n = t_n;
  rec.x = Eigen::MatrixXcd::Zero(m, samples);

  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  for (int k = 0; k < ensemble.count(); ++k) {
    const Source& src = ensemble.sources()[static_cast<std::size_t>(k)];
    const double phi =
        spatial_phase(src.theta, src.f, ensemble.f_nyquist(), spacing);
    const Eigen::VectorXcd a = steering_vector(geom, phi);
    const double psi = phase(rng);
    const double amp = std::sqrt(src.power);
    const double step = kTwoPi * src.f * t_n;

    Eigen::RowVectorXcd tone(samples);
    for (Eigen::Index n = 0; n < samples; ++n) {
      tone(n) = amp * std::polar(1.0, step * static_cast<double>(n) + psi);
    }
    rec.x.noalias() += a * tone;
  }

  rec.sigma2 = 0.0;
  if (std::isfinite(snr_db)) {
    rec.sigma2 = ensemble.mean_power() / std::pow(10.0, snr_db / 10.0);
    const double sd = std::sqrt(rec.sigma2 / 2.0);
    std::normal_distribution<double> gauss(0.0, sd);
    for (Eigen::Index n = 0; n < samples; ++n) {
      for (int i = 0; i < m; ++i) {
        rec.x(i, n) += cd(gauss(rng), gauss(rng));
      }
    }
  }
  return rec;
}

NyquistRecord synthesize_nyquist(const SourceEnsemble& ensemble,
                                 const ArrayGeometry& geom, Eigen::Index samples,
                                 double snr_db, std::uint64_t seed, double spacing) {
  std::mt19937_64 rng(seed);
  return synthesize_nyquist(ensemble, geom, samples, snr_db, rng, spacing);
}

}  // namespace subnyq
