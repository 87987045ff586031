#pragma once

// Torus-periodic Kahler forms omega_0 + i del delbar phi with a trig
// polynomial potential.  The flat part is the determinant-1 metric built from
// the eigencurrent pair, so phi = 0 reproduces flat_yau_metric(0); positivity
// of the perturbed form is certified on a subsampled grid at construction.

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "kummerlab/common.hpp"
#include "kummerlab/hermspace.hpp"
#include "kummerlab/torus.hpp"
#include "kummerlab/trigpoly.hpp"

namespace kummerlab {

class MetricField {
 public:
  // positivity_grid points per axis are checked at construction (0 skips the
  // scan, for fields already known positive, e.g. exact pullbacks)
  MetricField(const KummerSystem& sys, TrigPoly4 potential, int positivity_grid = 64)
      : sys_(&sys), potential_(std::move(potential)), flat_(sys.flat_yau_metric(0.0)) {
    rebuild_mode_terms();
    if (positivity_grid > 0) certify_positive(positivity_grid);
  }

  const KummerSystem& system() const { return *sys_; }
  const TrigPoly4& potential() const { return potential_; }
  const HermitianForm& flat_part() const { return flat_; }
  bool is_flat() const { return terms_.empty(); }

  double potential_value(const TorusPoint& p) const { return potential_(p.c); }

  // omega_0 + i del delbar phi at a point, as a hermitian matrix in the
  // standard frame
  HermitianForm operator()(const TorusPoint& p) const {
    HermitianForm h = flat_;
    for (const auto& t : terms_) {
      double dot = 0.0;
      for (int i = 0; i < 4; ++i) dot += t.m[i] * p.c[i];
      const double s = t.scale * std::cos(kTwoPi * dot);
      h.a += s * t.rank_one.a;
      h.b += s * t.rank_one.b;
      h.d += s * t.rank_one.d;
    }
    return h;
  }

  // evaluation that reports the offending point on positivity failure
  HermitianForm evaluate_checked(const TorusPoint& p) const {
    HermitianForm h = (*this)(p);
    if (!h.positive_definite())
      throw EvaluationError("metric field not positive definite at point (" +
                            std::to_string(p.c[0]) + ", " + std::to_string(p.c[1]) + ", " +
                            std::to_string(p.c[2]) + ", " + std::to_string(p.c[3]) + ")");
    return h;
  }

 private:
  struct ModeTerm {
    std::array<int, 4> m{};
    double scale = 0.0;          // -2 (2 pi)^2 c_m
    HermitianForm rank_one{};    // mu mu^dagger for mu = ((m0 - i m1)/2, (m2 - i m3)/2)
  };

  void rebuild_mode_terms() {
    terms_.clear();
    for (const auto& mo : potential_.modes) {
      if (mo.m == std::array<int, 4>{0, 0, 0, 0}) continue;  // constants drop out of i del delbar
      ModeTerm t;
      t.m = mo.m;
      t.scale = -2.0 * kTwoPi * kTwoPi * mo.coeff;
      const cplx mu1{0.5 * mo.m[0], -0.5 * mo.m[1]};
      const cplx mu2{0.5 * mo.m[2], -0.5 * mo.m[3]};
      t.rank_one.a = std::norm(mu1);
      t.rank_one.b = std::conj(mu1) * mu2;  // conjugate-first storage convention
      t.rank_one.d = std::norm(mu2);
      terms_.push_back(t);
    }
  }

  // Scan an n^4 uniform grid.  On grid points the phase of each mode is a
  // multiple of 2 pi / n, so a cosine table of size n replaces all the
  // transcendental calls.
  void certify_positive(int n) const {
    if (terms_.empty()) return;
    std::vector<double> cos_table(n);
    for (int k = 0; k < n; ++k) cos_table[k] = std::cos(kTwoPi * k / n);
    const auto mod = [n](std::int64_t v) {
      std::int64_t r = v % n;
      return r < 0 ? r + n : r;
    };
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
          for (int i3 = 0; i3 < n; ++i3) {
            HermitianForm h = flat_;
            for (const auto& t : terms_) {
              const std::int64_t dot = static_cast<std::int64_t>(t.m[0]) * i0 +
                                       static_cast<std::int64_t>(t.m[1]) * i1 +
                                       static_cast<std::int64_t>(t.m[2]) * i2 +
                                       static_cast<std::int64_t>(t.m[3]) * i3;
              const double s = t.scale * cos_table[mod(dot)];
              h.a += s * t.rank_one.a;
              h.b += s * t.rank_one.b;
              h.d += s * t.rank_one.d;
            }
            if (!(h.a > 0.0 && h.det() > 0.0))
              throw EvaluationError(
                  "metric field potential is too large: form not positive at grid point (" +
                  std::to_string(i0) + "," + std::to_string(i1) + "," + std::to_string(i2) +
                  "," + std::to_string(i3) + ")/" + std::to_string(n));
          }
  }

  const KummerSystem* sys_;
  TrigPoly4 potential_;
  HermitianForm flat_;
  std::vector<ModeTerm> terms_;
};

}  // namespace kummerlab
