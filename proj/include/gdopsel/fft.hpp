#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "gdopsel/geometry.hpp"

namespace gdopsel {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place radix-2 FFT; the inverse applies the 1/N factor.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse = false) {
  const std::size_t n = a.size();
  if (n == 0) return;
  if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? kTwoPi : -kTwoPi) / double(len);
    const std::complex<double> wlen = std::polar(1.0, ang);
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w{1.0, 0.0};
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    const double s = 1.0 / double(n);
    for (auto& z : a) z *= s;
  }
}

inline std::vector<std::complex<double>> fft(std::vector<std::complex<double>> a,
                                             bool inverse = false) {
  fft_inplace(a, inverse);
  return a;
}

}  // namespace gdopsel
