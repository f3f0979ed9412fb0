#include <doctest.h>

#include <random>
#include <vector>

#include "subnyq/fft.hpp"

using namespace subnyq;

namespace {

// quadratic-time reference transform, the oracle for every fast path
std::vector<cd> naive_dft(const std::vector<cd>& x, bool inverse) {
  const std::size_t n = x.size();
  std::vector<cd> out(n, cd(0, 0));
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t i = 0; i < n; ++i) {
      const double ang = sign * kTwoPi * static_cast<double>(q * i) / static_cast<double>(n);
      out[q] += x[i] * cd(std::cos(ang), std::sin(ang));
    }
  }
  return out;
}

std::vector<cd> random_signal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cd> x(n);
  for (auto& v : x) v = cd(g(rng), g(rng));
  return x;
}

}  // namespace

TEST_CASE("transform matches the naive reference for assorted sizes") {
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 12u, 64u, 100u, 128u, 200u}) {
    const auto x = random_signal(n, 1000 + n);
    const auto fast = fft::transform(x, false);
    const auto slow = naive_dft(x, false);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(fast[i] - slow[i]) < 1e-9 * static_cast<double>(n));
    }
  }
}

TEST_CASE("inverse transform matches the naive reference") {
  const auto x = random_signal(96, 7);
  const auto fast = fft::transform(x, true);
  const auto slow = naive_dft(x, true);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(fast[i] - slow[i]) < 1e-9 * 96);
  }
}

TEST_CASE("unitary pair round-trips and preserves energy") {
  for (std::size_t n : {16u, 60u, 128u}) {
    const auto x = random_signal(n, 42 + n);
    const auto spec = fft::unitary_forward(x);

    double ex = 0.0, es = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ex += std::norm(x[i]);
      es += std::norm(spec[i]);
    }
    CHECK(std::abs(ex - es) < 1e-10 * ex);

    const auto back = fft::unitary_inverse(spec);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(back[i] - x[i]) < 1e-10);
    }
  }
}

TEST_CASE("pow2 transform rejects other sizes") {
  std::vector<cd> x(6, cd(1, 0));
  CHECK_THROWS_AS(fft::transform_pow2(x, false), std::invalid_argument);
}
