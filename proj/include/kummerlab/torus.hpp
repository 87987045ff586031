#pragma once

// Linear automorphisms of the complex 2-torus C^2 / (Z+iZ)^2 and their
// quotients by z -> -z.  A hyperbolic integer matrix M acts by z -> M z; the
// induced system carries its entropy h = 2 log |leading eigenvalue|, the
// constant unstable/stable eigenlines, the pair of expanding/contracting
// eigencurrent forms normalized so their wedge integral is 1, and the flat
// family omega_t = e^t eta_+ + e^{-t} eta_- satisfying M* omega_t =
// omega_{t+h} exactly.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kummerlab/common.hpp"
#include "kummerlab/hermspace.hpp"

namespace kummerlab {

// ---------------------------------------------------------------------------
// Integer 2x2 matrices
// ---------------------------------------------------------------------------

struct Mat2i {
  std::int64_t m[2][2]{{1, 0}, {0, 1}};

  static Mat2i identity() { return {}; }

  std::int64_t det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
  std::int64_t trace() const { return m[0][0] + m[1][1]; }

  // valid for |det| = 1
  Mat2i inverse() const {
    const std::int64_t dt = det();
    Mat2i r;
    r.m[0][0] = m[1][1] * dt;
    r.m[0][1] = -m[0][1] * dt;
    r.m[1][0] = -m[1][0] * dt;
    r.m[1][1] = m[0][0] * dt;
    return r;
  }

  Mat2c complexified() const {
    Mat2c r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] = static_cast<double>(m[i][j]);
    return r;
  }
};

inline Mat2i operator*(const Mat2i& a, const Mat2i& b) {
  Mat2i r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
  return r;
}

// M^n for n >= 0.  Entries stay within int64 for the iterate counts used here
// (leading eigenvalue^n below 2^62).
inline Mat2i ipow(Mat2i base, int n) {
  Mat2i r = Mat2i::identity();
  while (n > 0) {
    if (n & 1) r = r * base;
    base = base * base;
    n >>= 1;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

// Canonical representative with all four real coordinates in [0,1);
// c = (Re z1, Im z1, Re z2, Im z2).
struct TorusPoint {
  std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};

  static TorusPoint from_complex(cplx z1, cplx z2) {
    TorusPoint p{{z1.real(), z1.imag(), z2.real(), z2.imag()}};
    p.reduce();
    return p;
  }

  cplx z1() const { return {c[0], c[1]}; }
  cplx z2() const { return {c[2], c[3]}; }

  void reduce() {
    for (double& x : c) {
      x -= std::floor(x);
      if (x >= 1.0) x = 0.0;  // floor rounding at the seam
    }
  }

  TorusPoint negated() const {
    TorusPoint p;
    for (int i = 0; i < 4; ++i) p.c[i] = c[i] == 0.0 ? 0.0 : 1.0 - c[i];
    return p;
  }

  bool lex_less(const TorusPoint& o) const { return c < o.c; }
};

// distance with lattice wrap, coordinatewise
inline double torus_distance(const TorusPoint& p, const TorusPoint& q) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    double d = std::fabs(p.c[i] - q.c[i]);
    d = std::min(d, 1.0 - d);
    s += d * d;
  }
  return std::sqrt(s);
}

// Orbifold point of the quotient by z -> -z: the lexicographically smaller of
// the two lifts.
struct KummerOrbifoldPoint {
  TorusPoint rep;
};

inline KummerOrbifoldPoint to_orbifold(const TorusPoint& p) {
  const TorusPoint n = p.negated();
  return {n.lex_less(p) ? n : p};
}

// The 16 two-torsion points, the fixed locus of the involution.
inline std::vector<TorusPoint> fixed_points() {
  std::vector<TorusPoint> out;
  out.reserve(16);
  for (int k = 0; k < 16; ++k) {
    TorusPoint p;
    for (int i = 0; i < 4; ++i) p.c[i] = (k >> i) & 1 ? 0.5 : 0.0;
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// The dynamical system
// ---------------------------------------------------------------------------

class KummerSystem {
 public:
  // Accepts any integer matrix with |det| = 1 and no eigenvalue of modulus 1.
  static KummerSystem make(const Mat2i& M) {
    KummerSystem s;
    s.M_ = M;
    const std::int64_t dt = M.det();
    if (dt != 1 && dt != -1)
      throw Error("make_system: matrix must have determinant +-1, got det = " +
                  std::to_string(dt));
    const double tr = static_cast<double>(M.trace());
    const double disc = tr * tr - 4.0 * static_cast<double>(dt);
    if (disc == 0.0)
      throw Error("make_system: matrix is parabolic (|trace| = 2), not hyperbolic");
    if (disc < 0.0)
      throw Error("make_system: matrix is elliptic (complex eigenvalues), not hyperbolic");
    const double root = std::sqrt(disc);
    const double l1 = 0.5 * (tr + root);
    const double l2 = 0.5 * (tr - root);
    if (std::fabs(std::fabs(l1) - 1.0) < 1e-12 || std::fabs(std::fabs(l2) - 1.0) < 1e-12)
      throw Error("make_system: matrix is parabolic or reflects (eigenvalue modulus 1)");

    const bool first_leads = std::fabs(l1) > std::fabs(l2);
    s.eig_u_ = first_leads ? l1 : l2;
    s.eig_s_ = first_leads ? l2 : l1;
    s.lambda_max_ = std::fabs(s.eig_u_);
    s.entropy_ = 2.0 * std::log(s.lambda_max_);

    const auto vu = eigenvector(M, s.eig_u_);
    const auto vs = eigenvector(M, s.eig_s_);
    // scale the real eigenbasis to a unimodular frame, splitting the factor
    // evenly between the two vectors
    const double cross = std::fabs(vu[0] * vs[1] - vu[1] * vs[0]);
    const double sc = 1.0 / std::sqrt(cross);
    s.frame_ = UnimodularFrame::make({cplx(sc * vu[0]), cplx(sc * vu[1])},
                                     {cplx(sc * vs[0]), cplx(sc * vs[1])});
    s.splitting_ = GeodesicSplitting::make(s.frame_);

    // dual covectors of the raw eigenbasis; the symmetric normalization
    // c+ = c- makes the eigencurrent wedge density exactly 1
    const double det_v = vu[0] * vs[1] - vu[1] * vs[0];
    const double inv = 1.0 / det_v;
    const double lu[2] = {vs[1] * inv, -vs[0] * inv};
    const double ls[2] = {-vu[1] * inv, vu[0] * inv};
    const double det_l = std::fabs(lu[0] * ls[1] - lu[1] * ls[0]);
    s.scale_plus_ = s.scale_minus_ = 1.0 / det_l;
    s.eta_plus_ = rank_one(lu, s.scale_plus_);
    s.eta_minus_ = rank_one(ls, s.scale_minus_);

    // real 4x4 action on (Re z1, Im z1, Re z2, Im z2) and its inverse
    s.A_ = real_action(M);
    s.A_inv_ = real_action(M.inverse());
    return s;
  }

  const Mat2i& matrix() const { return M_; }
  double entropy() const { return entropy_; }
  double lambda_max() const { return lambda_max_; }
  double unstable_eigenvalue() const { return eig_u_; }
  double stable_eigenvalue() const { return eig_s_; }
  const UnimodularFrame& frame() const { return frame_; }
  const GeodesicSplitting& splitting() const { return splitting_; }
  double eigencurrent_scale_plus() const { return scale_plus_; }
  double eigencurrent_scale_minus() const { return scale_minus_; }

  // eta_+ and eta_- as constant rank-one positive semi-definite forms with
  // M* eta_+- = e^{+-h} eta_+- and (eta_+ ^ eta_-)/dVol = 1
  std::pair<HermitianForm, HermitianForm> eigencurrent_forms() const {
    return {eta_plus_, eta_minus_};
  }

  // omega_t = e^t eta_+ + e^{-t} eta_-; determinant-1 for every t, and
  // M* omega_t = omega_{t+h} exactly
  HermitianForm flat_yau_metric(double t) const {
    return std::exp(t) * eta_plus_ + std::exp(-t) * eta_minus_;
  }

  // canonical representative of M^n p (n of either sign); one reduced
  // integer-matrix step at a time so coordinates never blow up
  TorusPoint apply(const TorusPoint& p, int n) const {
    TorusPoint q = p;
    const auto& A = n >= 0 ? A_ : A_inv_;
    for (int k = 0; k < std::abs(n); ++k) {
      TorusPoint r;
      for (int i = 0; i < 4; ++i) {
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) acc += static_cast<double>(A[i][j]) * q.c[j];
        r.c[i] = acc;
      }
      r.reduce();
      q = r;
    }
    return q;
  }

  // uniform dVol sampling, bit-reproducible per seed
  std::vector<TorusPoint> sample_volume(std::uint64_t seed, std::size_t count) const {
    SplitMix64 rng(seed);
    std::vector<TorusPoint> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      TorusPoint p;
      for (int j = 0; j < 4; ++j) p.c[j] = rng.next_double();
      out.push_back(p);
    }
    return out;
  }

  const std::array<std::array<std::int64_t, 4>, 4>& real_matrix() const { return A_; }

  // the real 4x4 matrix of M^n on torus coordinates (used for pulling back
  // Fourier modes); exact integer arithmetic
  std::array<std::array<std::int64_t, 4>, 4> real_power(int n) const {
    const Mat2i Mn = n >= 0 ? ipow(M_, n) : ipow(M_.inverse(), -n);
    return real_action(Mn);
  }

 private:
  static std::array<double, 2> eigenvector(const Mat2i& M, double lambda) {
    // kernel of (M - lambda I); choose the better-conditioned row
    const double r0x = static_cast<double>(M.m[0][0]) - lambda;
    const double r0y = static_cast<double>(M.m[0][1]);
    const double r1x = static_cast<double>(M.m[1][0]);
    const double r1y = static_cast<double>(M.m[1][1]) - lambda;
    std::array<double, 2> v{};
    if (r0x * r0x + r0y * r0y >= r1x * r1x + r1y * r1y)
      v = {-r0y, r0x};
    else
      v = {-r1y, r1x};
    const double n = std::hypot(v[0], v[1]);
    return {v[0] / n, v[1] / n};
  }

  static HermitianForm rank_one(const double l[2], double scale) {
    HermitianForm h;
    h.a = scale * l[0] * l[0];
    h.b = scale * l[0] * l[1];
    h.d = scale * l[1] * l[1];
    return h;
  }

  static std::array<std::array<std::int64_t, 4>, 4> real_action(const Mat2i& M) {
    const std::int64_t p = M.m[0][0], q = M.m[0][1], r = M.m[1][0], sgm = M.m[1][1];
    return {{{p, 0, q, 0}, {0, p, 0, q}, {r, 0, sgm, 0}, {0, r, 0, sgm}}};
  }

  Mat2i M_;
  double lambda_max_ = 0.0;
  double entropy_ = 0.0;
  double eig_u_ = 0.0;
  double eig_s_ = 0.0;
  UnimodularFrame frame_;
  GeodesicSplitting splitting_;
  double scale_plus_ = 0.0, scale_minus_ = 0.0;
  HermitianForm eta_plus_, eta_minus_;
  std::array<std::array<std::int64_t, 4>, 4> A_{}, A_inv_{};
};

// Pullback of a constant form by M^n: (M^n)^dagger H (M^n).
inline HermitianForm pullback(const KummerSystem& sys, const HermitianForm& h, int n) {
  const Mat2i Mn = n >= 0 ? ipow(sys.matrix(), n) : ipow(sys.matrix().inverse(), -n);
  return apply_linear(Mn.complexified(), h);
}

}  // namespace kummerlab
