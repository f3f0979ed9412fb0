#pragma once

#include <cstddef>
#include <vector>

#include "subnyq/common.hpp"

namespace subnyq::fft {

std::size_t next_pow2(std::size_t n);

/// In-place radix-2 transform; size must be a power of two.
/// Unnormalized: forward kernel e^{-j2pi qn/N}, inverse e^{+j2pi qn/N}.
void transform_pow2(std::vector<cd>& data, bool inverse);

/// Transform of any length (Bluestein fallback for non powers of two),
/// unnormalized like transform_pow2.
std::vector<cd> transform(std::vector<cd> data, bool inverse);

/// Unitary pair: both directions scale by 1/sqrt(N).
std::vector<cd> unitary_forward(std::vector<cd> data);
std::vector<cd> unitary_inverse(std::vector<cd> data);

}  // namespace subnyq::fft
