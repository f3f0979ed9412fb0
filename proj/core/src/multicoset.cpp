#include "subnyq/multicoset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "subnyq/fft.hpp"

namespace subnyq {

SamplingPattern::SamplingPattern(int reduction, std::vector<int> cosets)
    : reduction_(reduction), cosets_(std::move(cosets)) {
  if (reduction_ < 1) {
    throw std::invalid_argument("SamplingPattern: reduction factor must be >= 1");
  }
  if (cosets_.empty() || static_cast<int>(cosets_.size()) > reduction_) {
    throw std::invalid_argument("SamplingPattern: need 1 <= P <= L cosets");
  }
  for (std::size_t i = 0; i < cosets_.size(); ++i) {
    if (cosets_[i] < 0 || cosets_[i] > reduction_ - 1) {
      throw std::invalid_argument("SamplingPattern: coset offsets must lie in [0, L-1]");
    }
    if (i > 0 && cosets_[i] <= cosets_[i - 1]) {
      throw std::invalid_argument("SamplingPattern: coset offsets must be strictly increasing");
    }
  }
}

SamplingPattern SamplingPattern::first(int reduction, int branches) {
  std::vector<int> c(static_cast<std::size_t>(branches));
  std::iota(c.begin(), c.end(), 0);
  return SamplingPattern(reduction, std::move(c));
}

SamplingPattern SamplingPattern::random(int reduction, int branches,
                                        std::mt19937_64& rng) {
  if (branches < 1 || branches > reduction) {
    throw std::invalid_argument("SamplingPattern::random: need 1 <= P <= L");
  }
  if (branches == reduction) return first(reduction, branches);

  std::vector<int> all(static_cast<std::size_t>(reduction));
  std::iota(all.begin(), all.end(), 0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    // Fisher-Yates prefix draw of a P-subset
    std::vector<int> pool = all;
    for (int i = 0; i < branches; ++i) {
      std::uniform_int_distribution<int> pick(i, reduction - 1);
      std::swap(pool[static_cast<std::size_t>(i)],
                pool[static_cast<std::size_t>(pick(rng))]);
    }
    std::vector<int> c(pool.begin(), pool.begin() + branches);
    std::sort(c.begin(), c.end());
    SamplingPattern pattern(reduction, std::move(c));
    if (branches == 1 || pattern.subband_identifiable()) return pattern;
  }
  throw std::runtime_error("SamplingPattern::random: no identifiable pattern found");
}

bool SamplingPattern::subband_identifiable() const {
  int g = reduction_;
  for (std::size_t i = 1; i < cosets_.size(); ++i) {
    g = std::gcd(g, cosets_[i] - cosets_[0]);
  }
  return g == 1;
}

double ModulationMatrix::mean_coset() const {
  double sum = 0.0;
  for (int c : cosets) sum += c;
  return cosets.empty() ? 0.0 : sum / static_cast<double>(cosets.size());
}

ModulationMatrix modulation_matrix(const SamplingPattern& pattern) {
  const int l = pattern.reduction();
  const int p = pattern.branches();
  const double scale = 1.0 / std::sqrt(static_cast<double>(l));

  ModulationMatrix out;
  out.cosets = pattern.cosets();
  out.b.resize(p, l);
  for (int i = 0; i < p; ++i) {
    const double c = static_cast<double>(pattern.cosets()[static_cast<std::size_t>(i)]);
    for (int col = 0; col < l; ++col) {
      const double ang = kTwoPi / l * c * static_cast<double>(col + 1);
      out.b(i, col) = scale * cd(std::cos(ang), std::sin(ang));
    }
  }
  return out;
}

CosetStreams multicoset_sample(const NyquistRecord& record,
                               const SamplingPattern& pattern) {
  const Eigen::Index t = record.samples();
  const int l = pattern.reduction();
  const int p = pattern.branches();
  if (t % l != 0) {
    throw std::invalid_argument(
        "multicoset_sample: sample count must be divisible by the reduction factor");
  }
  const Eigen::Index n = t / l;
  const int m = record.sensors();

  CosetStreams out;
  out.sensors = m;
  out.branches = p;
  out.x.resize(static_cast<Eigen::Index>(m) * p, n);
  for (int im = 0; im < m; ++im) {
    for (int ip = 0; ip < p; ++ip) {
      const int c = pattern.cosets()[static_cast<std::size_t>(ip)];
      for (Eigen::Index in = 0; in < n; ++in) {
        out.x(static_cast<Eigen::Index>(im) * p + ip, in) =
            record.x(im, in * l + c);
      }
    }
  }
  return out;
}

SnapshotSet assemble_snapshots(const CosetStreams& streams,
                               const SamplingPattern& pattern, double f_nyquist) {
  if (streams.branches != pattern.branches()) {
    throw std::invalid_argument("assemble_snapshots: stream/pattern branch mismatch");
  }
  const Eigen::Index n = streams.length();
  if (n < 1) {
    throw std::invalid_argument("assemble_snapshots: streams are empty");
  }
  const int l = pattern.reduction();

  SnapshotSet out;
  out.sensors = streams.sensors;
  out.branches = streams.branches;
  out.f_sub = f_nyquist / static_cast<double>(l);
  out.y.resize(streams.x.rows(), n);

  std::vector<cd> buf(static_cast<std::size_t>(n));
  for (Eigen::Index row = 0; row < streams.x.rows(); ++row) {
    for (Eigen::Index in = 0; in < n; ++in) {
      buf[static_cast<std::size_t>(in)] = streams.x(row, in);
    }
    auto spec = fft::unitary_forward(buf);

    const int ip = static_cast<int>(row) % streams.branches;
    const double c = static_cast<double>(pattern.cosets()[static_cast<std::size_t>(ip)]);
    for (Eigen::Index q = 0; q < n; ++q) {
      const double frac = static_cast<double>(q) / static_cast<double>(n);
      const double ang = kTwoPi / l * c * (1.0 - frac);
      out.y(row, q) = spec[static_cast<std::size_t>(q)] * cd(std::cos(ang), std::sin(ang));
    }
  }
  return out;
}

ReceptionModel reception_matrix(const ArrayGeometry& geom,
                                const std::vector<double>& phis,
                                const ModulationMatrix& b,
                                const std::vector<int>& omega) {
  if (phis.size() != omega.size()) {
    throw std::invalid_argument("reception_matrix: phis/omega size mismatch");
  }
  const int l = b.reduction();
  std::set<int> seen;
  for (int band : omega) {
    if (band < 1 || band > l) {
      throw std::invalid_argument("reception_matrix: sub-band index out of range");
    }
    if (!seen.insert(band).second) {
      throw std::invalid_argument("reception_matrix: duplicate sub-band index " +
                                  std::to_string(band));
    }
  }

  const int m = geom.size();
  const int p = b.branches();
  const int k = static_cast<int>(phis.size());

  ReceptionModel out;
  out.omega = omega;
  out.support.reserve(static_cast<std::size_t>(k));
  out.g.resize(static_cast<Eigen::Index>(m) * p, k);
  for (int ik = 0; ik < k; ++ik) {
    out.support.push_back(ik * l + omega[static_cast<std::size_t>(ik)]);
    const Eigen::VectorXcd a = steering_vector(geom, phis[static_cast<std::size_t>(ik)]);
    const Eigen::VectorXcd col = b.column(omega[static_cast<std::size_t>(ik)]);
    for (int im = 0; im < m; ++im) {
      out.g.block(static_cast<Eigen::Index>(im) * p, ik, p, 1) = a(im) * col;
    }
  }
  return out;
}

}  // namespace subnyq
