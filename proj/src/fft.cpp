#include "roughns/fft.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace roughns {

namespace {

// Twiddle factors for a given half-length, cached per thread. Sizes in this
// project are small (<= 4096), so the cache stays tiny.
const std::vector<std::complex<double>>& twiddles(std::size_t half) {
    thread_local std::unordered_map<std::size_t, std::vector<std::complex<double>>> cache;
    auto it = cache.find(half);
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> w(half);
    for (std::size_t i = 0; i < half; ++i) {
        const double ang = -std::numbers::pi * static_cast<double>(i) / static_cast<double>(half);
        w[i] = {std::cos(ang), std::sin(ang)};
    }
    return cache.emplace(half, std::move(w)).first->second;
}

} // namespace

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_inplace(std::complex<double>* a, std::size_t n, bool inverse) {
    if (!is_pow2(n)) throw std::invalid_argument("fft_inplace: length must be a power of two");
    if (n <= 1) return;

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const auto& w = twiddles(half);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const std::complex<double> tw = inverse ? std::conj(w[k]) : w[k];
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + half] * tw;
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }

    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) a[i] *= inv;
    }
}

void fft_nd_inplace(std::complex<double>* data, const std::vector<std::size_t>& shape,
                    bool inverse) {
    std::size_t total = 1;
    for (std::size_t s : shape) total *= s;
    if (total == 0) return;

    std::vector<std::complex<double>> line;
    // Transform along each axis; gather strided lines into a contiguous
    // scratch buffer, transform, scatter back.
    std::size_t stride_after = 1; // product of sizes of axes after the current one
    for (std::size_t ax = shape.size(); ax-- > 0;) {
        const std::size_t n = shape[ax];
        if (n > 1) {
            line.resize(n);
            const std::size_t block = stride_after * n;
            for (std::size_t base = 0; base < total; base += block) {
                for (std::size_t off = 0; off < stride_after; ++off) {
                    std::complex<double>* p = data + base + off;
                    if (stride_after == 1) {
                        fft_inplace(p, n, inverse);
                    } else {
                        for (std::size_t i = 0; i < n; ++i) line[i] = p[i * stride_after];
                        fft_inplace(line.data(), n, inverse);
                        for (std::size_t i = 0; i < n; ++i) p[i * stride_after] = line[i];
                    }
                }
            }
        }
        stride_after *= n;
    }
}

} // namespace roughns
