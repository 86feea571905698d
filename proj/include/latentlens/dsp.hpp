#ifndef LATENTLENS_DSP_HPP
#define LATENTLENS_DSP_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace latentlens {

inline constexpr double kPi = 3.14159265358979323846;

inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * double(i) / double(n - 1));
  return w;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 FFT; size must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / double(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// Magnitude spectrum of a real frame zero-padded to the next power of two.
// Returns bins 0..nfft/2 inclusive.
inline std::vector<double> magnitude_spectrum(const std::vector<double>& frame,
                                              std::size_t& nfft_out) {
  const std::size_t nfft = next_pow2(frame.size());
  nfft_out = nfft;
  std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
  for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = frame[i];
  fft_inplace(buf);
  std::vector<double> mag(nfft / 2 + 1);
  for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(buf[i]);
  return mag;
}

// Orthonormal DCT-II of a real vector.
inline std::vector<double> dct2_ortho(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      s += x[i] * std::cos(kPi / double(n) * (double(i) + 0.5) * double(k));
    const double scale = (k == 0) ? std::sqrt(1.0 / double(n)) : std::sqrt(2.0 / double(n));
    out[k] = scale * s;
  }
  return out;
}

// Inverse of dct2_ortho (orthonormal DCT-III).
inline std::vector<double> idct2_ortho(const std::vector<double>& c) {
  const std::size_t n = c.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = std::sqrt(1.0 / double(n)) * c[0];
    for (std::size_t k = 1; k < n; ++k)
      s += std::sqrt(2.0 / double(n)) * c[k] *
           std::cos(kPi / double(n) * (double(i) + 0.5) * double(k));
    out[i] = s;
  }
  return out;
}

}  // namespace latentlens

#endif
