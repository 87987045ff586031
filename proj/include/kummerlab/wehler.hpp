#pragma once

// A (2,2,2)-surface in (P^1)^3 with its three Vieta involutions, the composed
// automorphism, the entropy of the induced cohomology action, orbit-sampled
// Lyapunov estimates, and the invariance check for the holomorphic 2-form.
//
// Points are stored projectively per factor with the largest-modulus
// coordinate normalized to 1; involutions use the Vieta sum form
// (u':v') = (-(Bv + Au) : Av), which transforms the defining polynomial by
// the exact factor A^2 and therefore preserves the surface identically.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kummerlab/common.hpp"

namespace kummerlab::wehler {

// ---------------------------------------------------------------------------
// Projective points
// ---------------------------------------------------------------------------

struct ProjPoint {
  cplx u{0.0, 0.0};
  cplx v{1.0, 0.0};

  ProjPoint normalized() const {
    const double au = std::abs(u), av = std::abs(v);
    if (au == 0.0 && av == 0.0) throw DegenerateMapError("ProjPoint: (0:0)");
    if (au > av) return {cplx{1.0, 0.0}, v / u};
    return {u / v, cplx{1.0, 0.0}};
  }

  bool at_infinity(double tol = 1e-12) const { return std::abs(v) <= tol * std::abs(u); }

  // affine coordinate u/v (may overflow at infinity; callers check)
  cplx affine() const { return u / v; }
};

struct SurfacePoint {
  std::array<ProjPoint, 3> f;  // x, y, z factors
};

// bidegree-2 parts (u^2, uv, v^2) of one factor and their derivative with
// respect to the non-unit chart coordinate
inline std::array<cplx, 3> parts(const ProjPoint& p) { return {p.u * p.u, p.u * p.v, p.v * p.v}; }

inline std::array<cplx, 3> parts_derivative(const ProjPoint& p) {
  // normalized points have exactly one coordinate equal to 1; the other is
  // the chart variable
  if (p.v == cplx{1.0, 0.0}) return {2.0 * p.u, cplx{1.0, 0.0}, cplx{0.0, 0.0}};
  return {cplx{0.0, 0.0}, cplx{1.0, 0.0}, 2.0 * p.v};
}

// the chart variable of a normalized point
inline cplx chart_value(const ProjPoint& p) { return p.v == cplx{1.0, 0.0} ? p.u : p.v; }

// ---------------------------------------------------------------------------
// 3x3 complex matrices (tangent maps of the threefold's charts)
// ---------------------------------------------------------------------------

struct Mat3c {
  cplx m[3][3]{};

  static Mat3c identity() {
    Mat3c r;
    for (int i = 0; i < 3; ++i) r.m[i][i] = 1.0;
    return r;
  }

  std::array<cplx, 3> apply(const std::array<cplx, 3>& v) const {
    std::array<cplx, 3> r{};
    for (int i = 0; i < 3; ++i) r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    return r;
  }

  double max_abs() const {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s = std::max(s, std::abs(m[i][j]));
    return s;
  }
};

inline Mat3c operator*(const Mat3c& a, const Mat3c& b) {
  Mat3c r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j] + a.m[i][2] * b.m[2][j];
  return r;
}

// largest singular value via the closed-form eigenvalues of J^dagger J
inline double sigma_max(const Mat3c& J) {
  // H = J^dagger J, hermitian positive semidefinite
  cplx H[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      cplx s{0.0, 0.0};
      for (int k = 0; k < 3; ++k) s += std::conj(J.m[k][i]) * J.m[k][j];
      H[i][j] = s;
    }
  const double q = std::real(H[0][0] + H[1][1] + H[2][2]) / 3.0;
  const double p1 = std::norm(H[0][1]) + std::norm(H[0][2]) + std::norm(H[1][2]);
  const double d0 = std::real(H[0][0]) - q, d1 = std::real(H[1][1]) - q,
               d2 = std::real(H[2][2]) - q;
  const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
  if (p2 <= 0.0) return std::sqrt(std::max(0.0, q));
  const double p = std::sqrt(p2 / 6.0);
  cplx B[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) B[i][j] = (H[i][j] - (i == j ? q : 0.0)) / p;
  const cplx detB = B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
                    B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
                    B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0]);
  double r = std::real(detB) / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double eig = q + 2.0 * p * std::cos(phi);
  return std::sqrt(std::max(0.0, eig));
}

// ---------------------------------------------------------------------------
// The surface
// ---------------------------------------------------------------------------

class WehlerSurface {
 public:
  double c[3][3][3]{};

  static WehlerSurface from_coefficients(const double (&coeff)[3][3][3]) {
    WehlerSurface s;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) s.c[i][j][k] = coeff[i][j][k];
    return s;
  }

  // documented default: coefficients uniform in [-1,1] from the fixed seed
  static constexpr std::uint64_t kDefaultSeed = 20250809;

  static WehlerSurface make_random(std::uint64_t seed = kDefaultSeed) {
    SplitMix64 rng(seed);
    WehlerSurface s;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) s.c[i][j][k] = rng.next_double(-1.0, 1.0);
    s.probe_nondegenerate(seed);
    return s;
  }

  double coefficient_scale() const {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) s = std::max(s, std::fabs(c[i][j][k]));
    return s;
  }

  cplx F(const SurfacePoint& p) const {
    const auto X = parts(p.f[0]), Y = parts(p.f[1]), Z = parts(p.f[2]);
    cplx s{0.0, 0.0};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) s += c[i][j][k] * X[i] * Y[j] * Z[k];
    return s;
  }

  // coefficients (A, B, C) of F as a quadratic in the chosen factor's
  // homogeneous pair, at the other two factors of p
  std::array<cplx, 3> fiber_quadratic(const SurfacePoint& p, int axis) const {
    const int b1 = axis == 0 ? 1 : 0;
    const int b2 = axis == 2 ? 1 : 2;
    const auto P1 = parts(p.f[b1]), P2 = parts(p.f[b2]);
    std::array<cplx, 3> q{};
    for (int a = 0; a < 3; ++a) {
      cplx s{0.0, 0.0};
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) s += coeff_at(axis, a, b1, j, b2, k) * P1[j] * P2[k];
      q[a] = s;
    }
    return q;
  }

  // d(A,B,C)/d(chart variable of factor `wrt`), wrt != axis
  std::array<cplx, 3> fiber_quadratic_derivative(const SurfacePoint& p, int axis, int wrt) const {
    const int b1 = axis == 0 ? 1 : 0;
    const int b2 = axis == 2 ? 1 : 2;
    const auto P1 = wrt == b1 ? parts_derivative(p.f[b1]) : parts(p.f[b1]);
    const auto P2 = wrt == b2 ? parts_derivative(p.f[b2]) : parts(p.f[b2]);
    std::array<cplx, 3> q{};
    for (int a = 0; a < 3; ++a) {
      cplx s{0.0, 0.0};
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) s += coeff_at(axis, a, b1, j, b2, k) * P1[j] * P2[k];
      q[a] = s;
    }
    return q;
  }

  // gradient of F with respect to the three chart variables
  std::array<cplx, 3> chart_gradient(const SurfacePoint& p) const {
    std::array<cplx, 3> g{};
    for (int axis = 0; axis < 3; ++axis) {
      const auto q = fiber_quadratic(p, axis);
      const auto dp = parts_derivative(p.f[axis]);
      g[axis] = q[0] * dp[0] + q[1] * dp[1] + q[2] * dp[2];
    }
    return g;
  }

 private:
  double coeff_at(int a_axis, int a_idx, int b_axis, int b_idx, int c_axis, int c_idx) const {
    int idx[3];
    idx[a_axis] = a_idx;
    idx[b_axis] = b_idx;
    idx[c_axis] = c_idx;
    return c[idx[0]][idx[1]][idx[2]];
  }

  // coarse smoothness probe: F and its chart gradient must not vanish
  // simultaneously at sampled surface points
  void probe_nondegenerate(std::uint64_t seed) const;
};

// ---------------------------------------------------------------------------
// Involutions
// ---------------------------------------------------------------------------

// The other root of A t^2 + B t + C given the root (u:v).  The sum form keeps
// F invariant up to the exact factor A^2; the degenerate corners fall back to
// the projective root at infinity.
inline ProjPoint vieta_other_root(const std::array<cplx, 3>& q, const ProjPoint& p) {
  const cplx A = q[0], B = q[1], C = q[2];
  const cplx s1 = -(B * p.v + A * p.u);
  const cplx s2 = A * p.v;
  const double scale =
      (std::abs(A) + std::abs(B) + std::abs(C)) * (std::abs(p.u) + std::abs(p.v));
  if (std::max(std::abs(s1), std::abs(s2)) > 1e-13 * scale)
    return ProjPoint{s1, s2}.normalized();
  // degenerate corner: the fiber quadratic is (numerically) linear
  if (std::abs(A) <= 1e-12 * (std::abs(B) + std::abs(C))) {
    if (std::abs(B) <= 1e-12 * std::abs(C))
      throw DegenerateMapError("vieta_other_root: identically degenerate fiber");
    if (p.at_infinity(1e-8)) return ProjPoint{-C, B}.normalized();
    return ProjPoint{cplx{1.0, 0.0}, cplx{0.0, 0.0}};
  }
  throw DegenerateMapError("vieta_other_root: unresolvable degenerate configuration");
}

inline SurfacePoint involution(const WehlerSurface& s, const SurfacePoint& p, int axis) {
  SurfacePoint out = p;
  out.f[axis] = vieta_other_root(s.fiber_quadratic(p, axis), p.f[axis]);
  return out;
}

// composed automorphism f = sigma_x o sigma_y o sigma_z
inline SurfacePoint composed_map(const WehlerSurface& s, const SurfacePoint& p) {
  return involution(s, involution(s, involution(s, p, 2), 1), 0);
}

// Involution together with its exact chart-to-chart tangent map.  Row `axis`
// holds the partials of the new chart variable; the other rows are identity.
inline std::pair<SurfacePoint, Mat3c> involution_with_jacobian(const WehlerSurface& s,
                                                               const SurfacePoint& p, int axis) {
  const auto q = s.fiber_quadratic(p, axis);
  const cplx A = q[0], B = q[1];
  const ProjPoint& pa = p.f[axis];
  const cplx U = -(B * pa.v + A * pa.u);
  const cplx V = A * pa.v;
  if (std::max(std::abs(U), std::abs(V)) <=
      1e-13 * (std::abs(A) + std::abs(B) + std::abs(q[2])) * (std::abs(pa.u) + std::abs(pa.v)))
    throw DegenerateMapError("involution_with_jacobian: degenerate fiber");

  // input pair derivative with respect to the factor's own chart variable
  cplx du, dv;
  if (pa.v == cplx{1.0, 0.0}) {
    du = 1.0;
    dv = 0.0;
  } else {
    du = 0.0;
    dv = 1.0;
  }

  // dU, dV with respect to each chart variable
  std::array<cplx, 3> dU{}, dV{};
  dU[axis] = -(B * dv + A * du);
  dV[axis] = A * dv;
  for (int b = 0; b < 3; ++b) {
    if (b == axis) continue;
    const auto dq = s.fiber_quadratic_derivative(p, axis, b);
    dU[b] = -(dq[1] * pa.v + dq[0] * pa.u);
    dV[b] = dq[0] * pa.v;
  }

  SurfacePoint out = p;
  out.f[axis] = ProjPoint{U, V}.normalized();

  Mat3c J = Mat3c::identity();
  const bool u_chart = std::abs(U) > std::abs(V);
  for (int b = 0; b < 3; ++b) {
    // chart variable of the image: V/U or U/V
    J.m[axis][b] = u_chart ? (dV[b] * U - V * dU[b]) / (U * U)
                           : (dU[b] * V - U * dV[b]) / (V * V);
  }
  return {out, J};
}

// Fubini-Study weights turn the chart Jacobian into the tangent map between
// metric-normed spaces; the operator norm is then the plain sigma_max.
inline Mat3c fs_adjust(const Mat3c& J, const SurfacePoint& from, const SurfacePoint& to) {
  Mat3c r = J;
  for (int i = 0; i < 3; ++i) {
    const double wo = 1.0 + std::norm(chart_value(to.f[i]));
    for (int j = 0; j < 3; ++j) {
      const double wi = 1.0 + std::norm(chart_value(from.f[j]));
      r.m[i][j] *= wi / wo;
    }
  }
  return r;
}

// composed map with the FS-adjusted tangent map
inline std::pair<SurfacePoint, Mat3c> composed_with_jacobian(const WehlerSurface& s,
                                                             const SurfacePoint& p) {
  auto [p1, Jz] = involution_with_jacobian(s, p, 2);
  auto [p2, Jy] = involution_with_jacobian(s, p1, 1);
  auto [p3, Jx] = involution_with_jacobian(s, p2, 0);
  const Mat3c J = fs_adjust(Jx, p2, p3) * (fs_adjust(Jy, p1, p2) * fs_adjust(Jz, p, p1));
  return {p3, J};
}

// ---------------------------------------------------------------------------
// Sampling points on the surface
// ---------------------------------------------------------------------------

// FS-uniform point of P^1: a normalized pair of complex gaussians
inline ProjPoint random_projective_point(SplitMix64& rng) {
  for (;;) {
    const cplx u = rng.next_complex_gaussian();
    const cplx v = rng.next_complex_gaussian();
    if (std::norm(u) + std::norm(v) > 1e-12) return ProjPoint{u, v}.normalized();
  }
}

// sample (y, z) at random and solve the fiber quadratic in x; the root choice
// burns one deterministic bit
inline SurfacePoint sample_surface_point(const WehlerSurface& s, SplitMix64& rng) {
  for (int attempt = 0; attempt < 256; ++attempt) {
    SurfacePoint p;
    p.f[1] = random_projective_point(rng);
    p.f[2] = random_projective_point(rng);
    p.f[0] = ProjPoint{cplx{0.0, 0.0}, cplx{1.0, 0.0}};
    const auto q = s.fiber_quadratic(p, 0);
    const cplx A = q[0], B = q[1], C = q[2];
    const bool take_second = rng.next_u64() & 1;
    const double scale = std::abs(A) + std::abs(B) + std::abs(C);
    if (scale < 1e-12) continue;
    if (std::abs(A) <= 1e-12 * scale) {
      if (std::abs(B) <= 1e-12 * scale) continue;
      p.f[0] = take_second ? ProjPoint{cplx{1.0, 0.0}, cplx{0.0, 0.0}}
                           : ProjPoint{-C, B}.normalized();
      return p;
    }
    const cplx disc = std::sqrt(B * B - 4.0 * A * C);
    const cplx Bp = std::abs(B + disc) >= std::abs(B - disc) ? B + disc : B - disc;
    if (std::abs(Bp) <= 1e-14 * scale) {
      p.f[0] = ProjPoint{-B, 2.0 * A}.normalized();  // double root
      return p;
    }
    const cplx root1 = -Bp / (2.0 * A);
    const cplx root2 = -2.0 * C / Bp;  // C / (A root1)
    p.f[0] = ProjPoint{take_second ? root2 : root1, cplx{1.0, 0.0}}.normalized();
    return p;
  }
  throw DegenerateMapError("sample_surface_point: surface looks degenerate");
}

inline void WehlerSurface::probe_nondegenerate(std::uint64_t seed) const {
  SplitMix64 rng(seed ^ 0x9E3779B97F4A7C15ull);
  const double scale = coefficient_scale();
  if (scale <= 0.0) throw Error("WehlerSurface: zero coefficient tensor");
  double min_grad = 1e300;
  for (int i = 0; i < 200; ++i) {
    const SurfacePoint p = sample_surface_point(*this, rng);
    const auto g = chart_gradient(p);
    const double gn = std::abs(g[0]) + std::abs(g[1]) + std::abs(g[2]);
    min_grad = std::min(min_grad, gn);
  }
  if (min_grad < 1e-8 * scale)
    throw Error("WehlerSurface: smoothness probe failed (gradient nearly vanishes on the "
                "surface); pick another seed");
}

// ---------------------------------------------------------------------------
// Cohomology action and entropy
// ---------------------------------------------------------------------------

struct Mat3i {
  std::int64_t m[3][3]{};

  static Mat3i identity() {
    Mat3i r;
    for (int i = 0; i < 3; ++i) r.m[i][i] = 1;
    return r;
  }
  std::int64_t trace() const { return m[0][0] + m[1][1] + m[2][2]; }
  std::int64_t det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }
};

inline Mat3i operator*(const Mat3i& a, const Mat3i& b) {
  Mat3i r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j] + a.m[i][2] * b.m[2][j];
  return r;
}

// intersection Gram matrix of the three hyperplane classes on a (2,2,2)
// surface: h_i^2 = 0, h_i . h_j = 2
inline Mat3i wehler_gram() {
  Mat3i g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g.m[i][j] = i == j ? 0 : 2;
  return g;
}

// the involution's action on (h1, h2, h3): fixes the two other classes and
// reflects h_axis to -h_axis + 2 h_b + 2 h_c (the unique nontrivial
// involutive isometry of the Gram form fixing the other two classes)
inline Mat3i cohomology_reflection(int axis) {
  Mat3i r = Mat3i::identity();
  r.m[axis][axis] = -1;
  for (int i = 0; i < 3; ++i)
    if (i != axis) r.m[i][axis] = 2;
  return r;
}

struct CohomologyEntropy {
  Mat3i rx, ry, rz;
  Mat3i product;                       // (sigma_x sigma_y sigma_z)^* = Rz Ry Rx
  std::array<std::int64_t, 3> char_poly;  // lambda^3 - c2 l^2 + c1 l - c0
  double spectral_radius = 0.0;
  double entropy = 0.0;
};

inline CohomologyEntropy cohomology_entropy() {
  CohomologyEntropy out;
  out.rx = cohomology_reflection(0);
  out.ry = cohomology_reflection(1);
  out.rz = cohomology_reflection(2);
  out.product = out.rz * out.ry * out.rx;
  const Mat3i& P = out.product;
  const std::int64_t c2 = P.trace();
  const std::int64_t c1 = (P.m[0][0] * P.m[1][1] - P.m[0][1] * P.m[1][0]) +
                          (P.m[0][0] * P.m[2][2] - P.m[0][2] * P.m[2][0]) +
                          (P.m[1][1] * P.m[2][2] - P.m[1][2] * P.m[2][1]);
  const std::int64_t c0 = P.det();
  out.char_poly = {c2, c1, c0};
  // largest real root of l^3 - c2 l^2 + c1 l - c0 by Newton from above
  auto poly = [&](double l) {
    return ((l - static_cast<double>(c2)) * l + static_cast<double>(c1)) * l -
           static_cast<double>(c0);
  };
  auto dpoly = [&](double l) {
    return (3.0 * l - 2.0 * static_cast<double>(c2)) * l + static_cast<double>(c1);
  };
  double l = static_cast<double>(c2) + 2.0;
  for (int i = 0; i < 200; ++i) {
    const double step = poly(l) / dpoly(l);
    l -= step;
    if (std::fabs(step) < 1e-14 * std::fabs(l)) break;
  }
  out.spectral_radius = l;
  out.entropy = std::log(l);
  return out;
}

// ---------------------------------------------------------------------------
// Lyapunov estimate
// ---------------------------------------------------------------------------

struct LyapunovEstimate {
  double final_estimate = 0.0;
  std::vector<std::pair<int, double>> profile;  // (n, (1/n) log ||Df^n||)
  int restarts = 0;
};

// (1/N) log ||D f^N|| along a volume-seeded orbit, with the product
// accumulated under rescaling.  Orbits hitting degenerate fibers restart from
// fresh seeded points and are counted.
inline LyapunovEstimate lyapunov_estimate(const WehlerSurface& s, std::uint64_t seed, int N,
                                          int profile_stride = 0) {
  if (N < 1000) throw Error("lyapunov_estimate: N must be at least 1000");
  if (profile_stride <= 0) profile_stride = std::max(1, N / 64);
  SplitMix64 rng(seed);
  LyapunovEstimate out;
  const double f_tol = 1e-9;

  SurfacePoint p = sample_surface_point(s, rng);
  Mat3c P = Mat3c::identity();
  double log_scale = 0.0;
  int n = 0;
  while (n < N) {
    bool bad = false;
    try {
      auto [np, J] = composed_with_jacobian(s, p);
      if (std::abs(s.F(np)) > f_tol * s.coefficient_scale()) bad = true;
      if (!bad) {
        P = J * P;
        const double sc = P.max_abs();
        if (!(sc > 0.0) || !std::isfinite(sc)) bad = true;
        if (!bad && sc > 1e30) {
          for (auto& row : P.m)
            for (auto& z : row) z /= sc;
          log_scale += std::log(sc);
        }
        p = np;
      }
    } catch (const DegenerateMapError&) {
      bad = true;
    }
    if (bad) {
      ++out.restarts;
      if (out.restarts > 64) throw Error("lyapunov_estimate: too many restarts");
      p = sample_surface_point(s, rng);
      P = Mat3c::identity();
      log_scale = 0.0;
      n = 0;
      out.profile.clear();
      continue;
    }
    ++n;
    if (n % profile_stride == 0 || n == N) {
      const double est = (std::log(sigma_max(P)) + log_scale) / n;
      out.profile.emplace_back(n, est);
    }
  }
  out.final_estimate = out.profile.back().second;
  return out;
}

// Birkhoff means of log ||D f^k|| over a sampled orbit for k = 1..k_max; the
// subadditivity of these means is the Fekete structure of the exponent.
inline std::vector<double> window_profile(const WehlerSurface& s, std::uint64_t seed, int N,
                                          int k_max) {
  SplitMix64 rng(seed);
  SurfacePoint p = sample_surface_point(s, rng);
  std::vector<Mat3c> js;
  js.reserve(static_cast<std::size_t>(N));
  int guard = 0;
  while (static_cast<int>(js.size()) < N) {
    try {
      auto [np, J] = composed_with_jacobian(s, p);
      js.push_back(J);
      p = np;
    } catch (const DegenerateMapError&) {
      if (++guard > 64) throw;
      p = sample_surface_point(s, rng);
      js.clear();
    }
  }
  std::vector<double> means(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (int k = 1; k <= k_max; ++k) {
    std::vector<double> vals;
    vals.reserve(js.size());
    for (std::size_t start = 0; start + static_cast<std::size_t>(k) <= js.size(); ++start) {
      Mat3c P = js[start];
      for (int t = 1; t < k; ++t) P = js[start + static_cast<std::size_t>(t)] * P;
      vals.push_back(std::log(sigma_max(P)));
    }
    means[static_cast<std::size_t>(k)] = pairwise_mean(vals);
  }
  return means;
}

// ---------------------------------------------------------------------------
// Invariance of the holomorphic 2-form
// ---------------------------------------------------------------------------

struct VolumeReport {
  double max_abs_log = 0.0;  // max |log |J_Omega|| over checked points
  int checked = 0;
  int skipped = 0;  // near-critical fibers
};

namespace detail {

// |Omega(v1, v2)| for the kernel basis pivoted on the largest gradient
// component; returns false near the critical locus
inline bool omega_frame(const WehlerSurface& s, const SurfacePoint& p,
                        std::array<cplx, 3>& v1, std::array<cplx, 3>& v2, cplx& omega_val) {
  const auto g = s.chart_gradient(p);
  int pivot = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(g[i]) > std::abs(g[pivot])) pivot = i;
  if (std::abs(g[pivot]) < 1e-7 * s.coefficient_scale()) return false;
  const int b1 = pivot == 0 ? 1 : 0;
  const int b2 = pivot == 2 ? 1 : 2;
  v1 = {};
  v2 = {};
  v1[b1] = 1.0;
  v1[pivot] = -g[b1] / g[pivot];
  v2[b2] = 1.0;
  v2[pivot] = -g[b2] / g[pivot];
  // residue form dw_b1 ^ dw_b2 / (dF/dw_pivot) on this basis (determinant 1)
  omega_val = 1.0 / g[pivot];
  return true;
}

}  // namespace detail

// |J_Omega| - 1 along an orbit of the composed map (or of a single involution
// when `axis` is 0..2): the modulus of the Jacobian with respect to the
// residue 2-form must be 1.
inline VolumeReport volume_invariance_check(const WehlerSurface& s, std::uint64_t seed, int N,
                                            int axis = -1) {
  SplitMix64 rng(seed);
  VolumeReport rep;
  SurfacePoint p = sample_surface_point(s, rng);
  int guard = 0;
  for (int n = 0; n < N; ++n) {
    try {
      SurfacePoint np;
      Mat3c J;
      if (axis >= 0) {
        std::tie(np, J) = involution_with_jacobian(s, p, axis);
      } else {
        auto [p1, Jz] = involution_with_jacobian(s, p, 2);
        auto [p2, Jy] = involution_with_jacobian(s, p1, 1);
        auto [p3, Jx] = involution_with_jacobian(s, p2, 0);
        np = p3;
        J = Jx * (Jy * Jz);
      }
      std::array<cplx, 3> v1{}, v2{}, w1{}, w2{};
      cplx om_p, om_np;
      if (!detail::omega_frame(s, p, v1, v2, om_p)) {
        ++rep.skipped;
      } else {
        w1 = J.apply(v1);
        w2 = J.apply(v2);
        std::array<cplx, 3> dummy1{}, dummy2{};
        if (!detail::omega_frame(s, np, dummy1, dummy2, om_np)) {
          ++rep.skipped;
        } else {
          // Omega at the image evaluated on the pushed frame: pivot minor
          // over the image gradient
          const auto gi = s.chart_gradient(np);
          int pivot = 0;
          for (int i = 1; i < 3; ++i)
            if (std::abs(gi[i]) > std::abs(gi[pivot])) pivot = i;
          const int b1 = pivot == 0 ? 1 : 0;
          const int b2 = pivot == 2 ? 1 : 2;
          const cplx minor = w1[b1] * w2[b2] - w1[b2] * w2[b1];
          const cplx num = minor / gi[pivot];
          const double jmod = std::abs(num / om_p);
          rep.max_abs_log = std::max(rep.max_abs_log, std::fabs(std::log(jmod)));
          ++rep.checked;
        }
      }
      // for single involutions, alternate back and forth stays on two points;
      // perturb by cycling the involutions to keep the orbit moving
      p = axis >= 0 ? involution(s, np, (axis + 1 + n % 2) % 3) : np;
      if (std::abs(s.F(p)) > 1e-9 * s.coefficient_scale())
        throw DegenerateMapError("volume_invariance_check: residual drift");
    } catch (const DegenerateMapError&) {
      if (++guard > 64) throw;
      p = sample_surface_point(s, rng);
    }
  }
  return rep;
}

}  // namespace kummerlab::wehler
