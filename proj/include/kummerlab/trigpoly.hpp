#pragma once

// Real trigonometric polynomials sum_m c_m cos(2 pi m.x) on a torus R^D/Z^D.
// Modes are canonicalized (first nonzero component positive, duplicates
// merged) so the representation is unique; all derivatives are exact.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "kummerlab/common.hpp"
#include "kummerlab/hermspace.hpp"

namespace kummerlab {

template <int D>
struct TrigPoly {
  struct Mode {
    std::array<int, D> m{};
    double coeff = 0.0;
  };

  std::vector<Mode> modes;  // canonical; the zero mode is the constant term

  TrigPoly() = default;
  explicit TrigPoly(std::vector<Mode> raw) { assign(std::move(raw)); }

  void assign(std::vector<Mode> raw) {
    std::map<std::array<int, D>, double> acc;
    for (auto& mo : raw) {
      std::array<int, D> m = mo.m;
      // cos is even: m and -m give the same function
      for (int i = 0; i < D; ++i) {
        if (m[i] != 0) {
          if (m[i] < 0)
            for (int j = 0; j < D; ++j) m[j] = -m[j];
          break;
        }
      }
      acc[m] += mo.coeff;
    }
    modes.clear();
    for (auto& [m, c] : acc)
      if (c != 0.0) modes.push_back({m, c});
  }

  bool empty() const { return modes.empty(); }

  double constant_term() const {
    for (const auto& mo : modes) {
      bool zero = true;
      for (int i = 0; i < D; ++i) zero = zero && mo.m[i] == 0;
      if (zero) return mo.coeff;
    }
    return 0.0;
  }

  // exact mean over the torus: the zero-mode coefficient
  double mean() const { return constant_term(); }

  int max_mode_component() const {
    int mx = 0;
    for (const auto& mo : modes)
      for (int i = 0; i < D; ++i) mx = std::max(mx, std::abs(mo.m[i]));
    return mx;
  }

  double operator()(const std::array<double, D>& x) const {
    double s = 0.0;
    for (const auto& mo : modes) {
      double dot = 0.0;
      for (int i = 0; i < D; ++i) dot += mo.m[i] * x[i];
      s += mo.coeff * std::cos(kTwoPi * dot);
    }
    return s;
  }

  double partial(const std::array<double, D>& x, int axis) const {
    double s = 0.0;
    for (const auto& mo : modes) {
      if (mo.m[axis] == 0) continue;
      double dot = 0.0;
      for (int i = 0; i < D; ++i) dot += mo.m[i] * x[i];
      s -= mo.coeff * kTwoPi * mo.m[axis] * std::sin(kTwoPi * dot);
    }
    return s;
  }

  double second_partial(const std::array<double, D>& x, int ax1, int ax2) const {
    double s = 0.0;
    for (const auto& mo : modes) {
      if (mo.m[ax1] == 0 || mo.m[ax2] == 0) continue;
      double dot = 0.0;
      for (int i = 0; i < D; ++i) dot += mo.m[i] * x[i];
      s -= mo.coeff * kTwoPi * kTwoPi * mo.m[ax1] * mo.m[ax2] * std::cos(kTwoPi * dot);
    }
    return s;
  }
};

using TrigPoly2 = TrigPoly<2>;
using TrigPoly4 = TrigPoly<4>;

// Composition with an integer-linear torus map x -> A x: again a trig
// polynomial, with modes A^T m and unchanged coefficients.
inline TrigPoly4 compose_linear(const TrigPoly4& phi,
                                const std::array<std::array<std::int64_t, 4>, 4>& A) {
  std::vector<TrigPoly4::Mode> out;
  out.reserve(phi.modes.size());
  for (const auto& mo : phi.modes) {
    TrigPoly4::Mode nm;
    nm.coeff = mo.coeff;
    for (int i = 0; i < 4; ++i) {
      std::int64_t s = 0;
      for (int j = 0; j < 4; ++j) s += A[j][i] * mo.m[j];
      nm.m[i] = static_cast<int>(s);
    }
    out.push_back(nm);
  }
  return TrigPoly4(std::move(out));
}

// Exact complex Hessian entries 2 * d^2 phi / dz_j dz_k-bar of a potential on
// the 4-torus (the factor 2 matches the (i/2) form convention, so these are
// the hermitian-matrix increments contributed by i del delbar phi).
inline HermitianForm complex_hessian_form(const TrigPoly4& phi, const std::array<double, 4>& x) {
  HermitianForm h{0.0, {0.0, 0.0}, 0.0};
  for (const auto& mo : phi.modes) {
    double dot = 0.0;
    for (int i = 0; i < 4; ++i) dot += mo.m[i] * x[i];
    const double s = -2.0 * kTwoPi * kTwoPi * mo.coeff * std::cos(kTwoPi * dot);
    const cplx mu1{0.5 * mo.m[0], -0.5 * mo.m[1]};
    const cplx mu2{0.5 * mo.m[2], -0.5 * mo.m[3]};
    h.a += s * std::norm(mu1);
    h.b += s * std::conj(mu1) * mu2;  // conjugate-first storage convention
    h.d += s * std::norm(mu2);
  }
  return h;
}

}  // namespace kummerlab
