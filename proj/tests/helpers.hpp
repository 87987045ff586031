#pragma once

#include "kummerlab/common.hpp"
#include "kummerlab/hermspace.hpp"
#include "kummerlab/torus.hpp"

namespace testutil {

using namespace kummerlab;

// random determinant-1 positive form: a = e^s, b arbitrary, d forced
inline HermitianForm random_unimodular(SplitMix64& rng, double spread = 1.0) {
  const double a = std::exp(rng.next_double(-spread, spread));
  const cplx b{rng.next_double(-spread, spread), rng.next_double(-spread, spread)};
  const double d = (1.0 + std::norm(b)) / a;
  return {a, b, d};
}

// random volume-preserving (|det| = 1) complex linear map
inline Mat2c random_unimodular_map(SplitMix64& rng, double spread = 1.0) {
  for (;;) {
    Mat2c L;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        L.m[i][j] = cplx{rng.next_double(-spread, spread), rng.next_double(-spread, spread)};
    const cplx dt = L.det();
    const double ad = std::abs(dt);
    if (ad < 1e-3) continue;
    const cplx s = std::pow(dt, -0.5);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) L.m[i][j] *= s;
    return L;
  }
}

inline Mat2i cat_matrix() { return Mat2i{{{2, 1}, {1, 1}}}; }
inline Mat2i skew_matrix() { return Mat2i{{{2, 1}, {3, 2}}}; }

}  // namespace testutil
