#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qmcfold {

namespace detail {

/// In-place iterative radix-2 FFT; a.size() must be a power of two.
inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft length must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  constexpr double kPi = 3.14159265358979323846;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = 2.0 * kPi / static_cast<double>(len) * (inverse ? -1.0 : 1.0);
    const std::complex<double> step(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= step;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

}  // namespace detail

/// C*v for the circulant matrix C with first column `column`,
/// C[i][h] = column[(i - h) mod L]. Arbitrary L (here typically b^n - 1,
/// rarely a power of two) is handled by zero-padding to a power of two,
/// taking the linear convolution, and folding it back mod L.
inline std::vector<double> circulant_fft_multiply(const std::vector<double>& column,
                                                  const std::vector<double>& v) {
  if (column.size() != v.size()) throw std::invalid_argument("circulant length mismatch");
  const std::size_t L = column.size();
  if (L == 0) throw std::invalid_argument("circulant length must be >= 1");
  if (L == 1) return {column[0] * v[0]};

  std::size_t m = 1;
  while (m < 2 * L - 1) m <<= 1;

  std::vector<std::complex<double>> fa(m), fb(m);
  for (std::size_t i = 0; i < L; ++i) {
    fa[i] = column[i];
    fb[i] = v[i];
  }
  detail::fft_pow2(fa, false);
  detail::fft_pow2(fb, false);
  for (std::size_t i = 0; i < m; ++i) fa[i] *= fb[i];
  detail::fft_pow2(fa, true);

  std::vector<double> out(L);
  for (std::size_t i = 0; i < L; ++i) {
    double r = fa[i].real();
    if (i + L < 2 * L - 1) r += fa[i + L].real();
    out[i] = r;
  }
  return out;
}

}  // namespace qmcfold
