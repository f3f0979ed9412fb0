#include "subnyq/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace subnyq::fft {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void transform_pow2(std::vector<cd>& data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0) return;
  if ((n & (n - 1)) != 0) {
    throw std::invalid_argument("transform_pow2: size must be a power of two");
  }

  // bit reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * kTwoPi / static_cast<double>(len);
    const cd wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cd w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        cd u = data[i + k];
        cd v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

namespace {

// Bluestein: reexpress an arbitrary-length DFT as a circular convolution
// with a chirp, which runs on power-of-two transforms.
std::vector<cd> bluestein(const std::vector<cd>& data, bool inverse) {
  const std::size_t n = data.size();
  const double sign = inverse ? 1.0 : -1.0;

  std::vector<cd> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the argument bounded for large n
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = cd(std::cos(ang), std::sin(ang));
  }

  const std::size_t m = next_pow2(2 * n - 1);
  std::vector<cd> a(m, cd(0.0, 0.0));
  std::vector<cd> b(m, cd(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) a[k] = data[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    b[k] = b[m - k] = std::conj(chirp[k]);
  }

  transform_pow2(a, false);
  transform_pow2(b, false);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  transform_pow2(a, true);

  std::vector<cd> out(n);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k] * scale;
  return out;
}

}  // namespace

std::vector<cd> transform(std::vector<cd> data, bool inverse) {
  const std::size_t n = data.size();
  if (n <= 1) return data;
  if ((n & (n - 1)) == 0) {
    transform_pow2(data, inverse);
    return data;
  }
  return bluestein(data, inverse);
}

std::vector<cd> unitary_forward(std::vector<cd> data) {
  const std::size_t n = data.size();
  auto out = transform(std::move(data), false);
  const double s = n > 0 ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0;
  for (auto& v : out) v *= s;
  return out;
}

std::vector<cd> unitary_inverse(std::vector<cd> data) {
  const std::size_t n = data.size();
  auto out = transform(std::move(data), true);
  const double s = n > 0 ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0;
  for (auto& v : out) v *= s;
  return out;
}

}  // namespace subnyq::fft
