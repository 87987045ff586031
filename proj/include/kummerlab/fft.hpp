#pragma once

// Minimal iterative radix-2 complex FFT, plus the 4-axis transform used by
// the coboundary solver.  Deterministic, power-of-two sizes only.

#include <vector>

#include "kummerlab/common.hpp"

namespace kummerlab::detail {

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// in-place, sign = -1 forward / +1 inverse (unscaled)
inline void fft_line(cplx* data, int n, int stride, int sign, std::vector<cplx>& scratch) {
  scratch.resize(n);
  for (int i = 0; i < n; ++i) scratch[i] = data[i * stride];
  // bit reversal
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(scratch[i], scratch[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = sign * kTwoPi / len;
    const cplx wl{std::cos(ang), std::sin(ang)};
    for (int i = 0; i < n; i += len) {
      cplx w{1.0, 0.0};
      for (int k = 0; k < len / 2; ++k) {
        const cplx u = scratch[i + k];
        const cplx v = scratch[i + k + len / 2] * w;
        scratch[i + k] = u + v;
        scratch[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  for (int i = 0; i < n; ++i) data[i * stride] = scratch[i];
}

// FFT along every axis of a g^4 array (row-major, last index fastest).
// sign = -1: forward (then divide by g^4 to get Fourier coefficients).
inline void fft4(std::vector<cplx>& data, int g, int sign) {
  if (!is_pow2(g)) throw Error("fft4: grid must be a power of two");
  std::vector<cplx> scratch;
  const int g2 = g * g, g3 = g2 * g;
  const int strides[4] = {g3, g2, g, 1};
  for (int axis = 0; axis < 4; ++axis) {
    const int stride = strides[axis];
    // one line per combination of the three non-axis digits
    for (int i = 0; i < g3; ++i) {
      // decompose i into the three non-axis digits
      int digits[3] = {(i / g2) % g, (i / g) % g, i % g};
      int full[4];
      int vi = 0;
      for (int t = 0; t < 4; ++t) full[t] = (t == axis) ? 0 : digits[vi++];
      const int base = full[0] * g3 + full[1] * g2 + full[2] * g + full[3];
      fft_line(data.data() + base, g, stride, sign, scratch);
    }
  }
}

}  // namespace kummerlab::detail
