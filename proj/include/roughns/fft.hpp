#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace roughns {

/// In-place complex FFT, decimation-in-time radix-2. `n` must be a power of
/// two. `inverse` applies the conjugate transform including the 1/n factor,
/// so fft(ifft(x)) == x to roundoff.
void fft_inplace(std::complex<double>* data, std::size_t n, bool inverse);

/// Multi-dimensional FFT over a row-major array of shape `shape` (slowest
/// axis first), applied along every axis.
void fft_nd_inplace(std::complex<double>* data, const std::vector<std::size_t>& shape,
                    bool inverse);

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

bool is_pow2(std::size_t n);

} // namespace roughns
