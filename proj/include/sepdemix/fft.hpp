#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "sepdemix/types.hpp"

namespace sepdemix {

namespace detail {

/// In-place iterative radix-2 transform, unscaled. n must be a power of two.
template <typename Real>
void fft_pow2(std::complex<Real>* data, std::size_t n, bool inverse) {
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  const Real sign = inverse ? Real(1) : Real(-1);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const Real angle = sign * Real(2) * std::numbers::pi_v<Real> / Real(len);
    const std::complex<Real> wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<Real> w(1);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = data[i + k];
        const auto v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

/// Bluestein chirp-z transform for arbitrary n (forward, unscaled).
template <typename Real>
void fft_bluestein(std::complex<Real>* data, std::size_t n) {
  using C = std::complex<Real>;
  const std::size_t m = std::bit_ceil(2 * n - 1);
  std::vector<C> chirp(n), a(m, C(0)), b(m, C(0));
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the chirp angle well conditioned for large k
    const std::size_t k2 = (k * k) % (2 * n);
    const Real angle = -std::numbers::pi_v<Real> * Real(k2) / Real(n);
    chirp[k] = C(std::cos(angle), std::sin(angle));
    a[k] = data[k] * chirp[k];
  }
  b[0] = C(1);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
  fft_pow2(a.data(), m, false);
  fft_pow2(b.data(), m, false);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  fft_pow2(a.data(), m, true);
  const Real inv_m = Real(1) / Real(m);
  for (std::size_t k = 0; k < n; ++k) data[k] = a[k] * inv_m * chirp[k];
}

}  // namespace detail

/// Unscaled discrete Fourier transform of arbitrary length, in place.
/// Forward uses the e^{-2 pi i kn/L} kernel; inverse conjugates it and
/// applies no 1/L factor.
template <typename Real>
void fft_unscaled(std::complex<Real>* data, std::size_t n, bool inverse) {
  if (n <= 1) return;
  if (std::has_single_bit(n)) {
    detail::fft_pow2(data, n, inverse);
    return;
  }
  if (inverse) {
    for (std::size_t k = 0; k < n; ++k) data[k] = std::conj(data[k]);
    detail::fft_bluestein(data, n);
    for (std::size_t k = 0; k < n; ++k) data[k] = std::conj(data[k]);
  } else {
    detail::fft_bluestein(data, n);
  }
}

/// Unitary DFT: (1/sqrt(L)) F x. Norm preserving, its own inverse's adjoint.
template <typename Derived>
Vector<typename Derived::Scalar> dft_unitary(const Eigen::MatrixBase<Derived>& x) {
  using C = typename Derived::Scalar;
  using Real = typename C::value_type;
  Vector<C> out = x;
  fft_unscaled(out.data(), static_cast<std::size_t>(out.size()), false);
  out *= Real(1) / std::sqrt(Real(out.size()));
  return out;
}

/// Inverse of dft_unitary.
template <typename Derived>
Vector<typename Derived::Scalar> idft_unitary(const Eigen::MatrixBase<Derived>& x) {
  using C = typename Derived::Scalar;
  using Real = typename C::value_type;
  Vector<C> out = x;
  fft_unscaled(out.data(), static_cast<std::size_t>(out.size()), true);
  out *= Real(1) / std::sqrt(Real(out.size()));
  return out;
}

/// O(L^2) unitary DFT. Oracle path; also the reference for small sizes.
template <typename Derived>
Vector<typename Derived::Scalar> naive_dft_unitary(const Eigen::MatrixBase<Derived>& x,
                                                   bool inverse = false) {
  using C = typename Derived::Scalar;
  using Real = typename C::value_type;
  const Index n = x.size();
  Vector<C> out = Vector<C>::Zero(n);
  const Real sign = inverse ? Real(1) : Real(-1);
  for (Index l = 0; l < n; ++l) {
    C acc(0);
    for (Index k = 0; k < n; ++k) {
      const Real angle =
          sign * Real(2) * std::numbers::pi_v<Real> * Real((l * k) % n) / Real(n);
      acc += x(k) * C(std::cos(angle), std::sin(angle));
    }
    out(l) = acc / std::sqrt(Real(n));
  }
  return out;
}

}  // namespace sepdemix
