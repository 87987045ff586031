#pragma once

// Geometry of positive hermitian forms on a 2-dimensional complex vector
// space with a fixed volume.  Forms of determinant 1 in a unimodular frame
// are points of hyperbolic 3-space; the library exposes the distance, the
// nearest-point projection onto the geodesic of a line splitting, maximizing
// lines, and the wedge pairing that ties the distance to intersection
// numbers.
//
// Conventions, used consistently everywhere:
//   * a form is the matrix [[a, b], [conj(b), d]] in a declared frame and
//     h(u, v) = sum_{jk} conj(u_j) H_{jk} v_k (conjugate-linear in the first
//     slot; the associated real (1,1)-form has coefficient matrix H^T, a
//     distinction the wedge and volume formulas cannot see);
//   * with dVol = dx1 dy1 dx2 dy2 the induced volume is det(H) dVol and
//     (w1 ^ w2) / dVol = a1 d2 + a2 d1 - 2 Re(b1 conj(b2));
//   * the pairing normalization is pinned by wedge_ratio(I, I) = 2, and for
//     determinant-1 forms wedge_ratio = e^dist + e^{-dist}.

#include <algorithm>
#include <cmath>
#include <optional>

#include "kummerlab/common.hpp"

namespace kummerlab {

struct HermitianForm {
  double a = 1.0;
  cplx b{0.0, 0.0};
  double d = 1.0;

  static HermitianForm identity() { return {1.0, {0.0, 0.0}, 1.0}; }

  double det() const { return a * d - std::norm(b); }

  // h(v, v)
  double operator()(const C2& v) const {
    return a * std::norm(v.x) + 2.0 * std::real(std::conj(v.x) * b * v.y) + d * std::norm(v.y);
  }

  // h(u, v), conjugate-linear in u
  cplx eval(const C2& u, const C2& v) const {
    return std::conj(u.x) * (a * v.x + b * v.y) + std::conj(u.y) * (std::conj(b) * v.x + d * v.y);
  }

  bool positive_definite() const {
    // The determinant test is relative to the size of the products so it
    // stays meaningful for ill-conditioned pullbacks, whose determinant is
    // exact in theory but drowned in rounding when formed naively.
    const double scale = std::abs(a * d) + std::norm(b);
    return a > 0.0 && d > 0.0 && det() > -1e-12 * scale;
  }

  bool unimodular(double tol = 1e-12) const {
    const double scale = std::max(1.0, std::abs(a * d) + std::norm(b));
    return positive_definite() && std::abs(det() - 1.0) <= tol * scale;
  }
};

inline HermitianForm operator+(const HermitianForm& p, const HermitianForm& q) {
  return {p.a + q.a, p.b + q.b, p.d + q.d};
}

inline HermitianForm operator*(double s, const HermitianForm& h) { return {s * h.a, s * h.b, s * h.d}; }

inline void require_positive(const HermitianForm& h, const char* who) {
  if (!h.positive_definite())
    throw InvalidFormError(std::string(who) + ": form is not positive definite");
}

inline void require_unimodular(const HermitianForm& h, const char* who) {
  require_positive(h, who);
  if (!h.unimodular())
    throw InvalidFormError(std::string(who) + ": form is not unimodular (det != 1)");
}

// Rescale to determinant 1.
inline HermitianForm normalized(const HermitianForm& h) {
  require_positive(h, "normalized");
  const double s = 1.0 / std::sqrt(h.det());
  return {s * h.a, s * h.b, s * h.d};
}

// Pullback L*h of a form by a complex-linear map, (L*h)(u,v) = h(Lu, Lv);
// as matrices L^dagger H L.
inline HermitianForm apply_linear(const Mat2c& L, const HermitianForm& h) {
  const cplx bb = h.b;
  // columns of L are the images of the basis vectors
  const C2 c0{L.m[0][0], L.m[1][0]};
  const C2 c1{L.m[0][1], L.m[1][1]};
  HermitianForm r;
  r.a = h(c0);
  r.d = h(c1);
  r.b = std::conj(c0.x) * (h.a * c1.x + bb * c1.y) +
        std::conj(c0.y) * (std::conj(bb) * c1.x + h.d * c1.y);
  return r;
}

// (w1 ^ w2) / dVol for forms in a common frame.
inline double wedge_ratio(const HermitianForm& h1, const HermitianForm& h2) {
  require_positive(h1, "wedge_ratio");
  require_positive(h2, "wedge_ratio");
  return h1.a * h2.d + h2.a * h1.d - 2.0 * std::real(h1.b * std::conj(h2.b));
}

// Hyperbolic distance between determinant-1 forms: the log of the largest
// relative eigenvalue, recovered from the wedge pairing via
// wedge = e^d + e^{-d}.  acosh keeps full accuracy both near 0 and for the
// huge pairings produced by high iterates.
inline double dist(const HermitianForm& h1, const HermitianForm& h2) {
  require_unimodular(h1, "dist");
  require_unimodular(h2, "dist");
  const double w = wedge_ratio(h1, h2);
  return std::acosh(std::max(1.0, 0.5 * w));
}

// ---------------------------------------------------------------------------
// Frames and geodesics
// ---------------------------------------------------------------------------

// Tangent basis whose complex determinant has modulus 1 with respect to the
// reference volume (the standard frame is declared unimodular).
struct UnimodularFrame {
  C2 e1;
  C2 e2;

  double det_modulus() const { return std::abs(det2(e1, e2)); }

  static UnimodularFrame make(const C2& e1, const C2& e2, double tol = 1e-12) {
    UnimodularFrame f{e1, e2};
    if (std::abs(f.det_modulus() - 1.0) > tol)
      throw InvalidFormError("UnimodularFrame: |det(e1,e2)| != 1");
    return f;
  }
};

// Entries of a form (given in the standard frame) in the frame (e1, e2).
// A unimodular change of frame preserves the determinant.
inline HermitianForm express_in_frame(const HermitianForm& h, const UnimodularFrame& f) {
  HermitianForm r;
  r.a = h(f.e1);
  r.d = h(f.e2);
  r.b = h.eval(f.e1, f.e2);
  return r;
}

// A splitting V = W+ (+) W- of the tangent space into two lines; the forms
// making the splitting orthogonal are a geodesic of H^3.
struct GeodesicSplitting {
  UnimodularFrame frame;

  static GeodesicSplitting make(const UnimodularFrame& f) {
    if (std::abs(det2(f.e1, f.e2)) < 0.5)
      throw InvalidSplittingError("GeodesicSplitting: frame is degenerate");
    return GeodesicSplitting{f};
  }
};

// Nearest-point projection onto the geodesic of the splitting, for a form
// already expressed in the splitting's frame: [[a,b],[conj b,d]] projects to
// diag(sqrt(a/d), sqrt(d/a)).  Output lies on the geodesic and the map is
// idempotent and distance-decreasing.
inline HermitianForm project_to_geodesic(const HermitianForm& h, const GeodesicSplitting& g) {
  if (std::abs(det2(g.frame.e1, g.frame.e2)) < 0.5)
    throw InvalidSplittingError("project_to_geodesic: degenerate splitting");
  require_unimodular(h, "project_to_geodesic");
  const double s = std::sqrt(h.a / h.d);
  return {s, {0.0, 0.0}, 1.0 / s};
}

// ---------------------------------------------------------------------------
// Maximizing lines
// ---------------------------------------------------------------------------

struct MaximizingLine {
  bool unique = false;
  C2 direction;  // unit vector, phase fixed deterministically; valid iff unique
};

// Eigendirection of h2 relative to h1 with the largest eigenvalue.  Non-unique
// exactly when the two relative eigenvalues coincide (relative gap < 1e-10),
// i.e. when h1 = h2 for unimodular inputs.
inline MaximizingLine maximizing_line(const HermitianForm& h1, const HermitianForm& h2) {
  require_positive(h1, "maximizing_line");
  require_positive(h2, "maximizing_line");
  // G = h1^{-1} h2; trace and determinant give both eigenvalues.
  const double inv_det1 = 1.0 / h1.det();
  // h1^{-1} = [[d1, -b1], [-conj(b1), a1]] / det1
  const cplx g00 = (h1.d * h2.a - h1.b * std::conj(h2.b)) * inv_det1;
  const cplx g01 = (h1.d * h2.b - h1.b * h2.d) * inv_det1;
  const cplx g10 = (-std::conj(h1.b) * h2.a + h1.a * std::conj(h2.b)) * inv_det1;
  const cplx g11 = (-std::conj(h1.b) * h2.b + h1.a * h2.d) * inv_det1;
  const double tr = std::real(g00 + g11);
  const double dt = h2.det() * inv_det1;
  double disc = tr * tr - 4.0 * dt;
  if (disc < 0.0) disc = 0.0;  // roundoff; eigenvalues are real and positive
  const double root = std::sqrt(disc);
  const double mu_max = 0.5 * (tr + root);
  const double gap = root / std::max(mu_max, 1e-300);
  if (gap < 1e-10) return {false, {}};

  // kernel of (G - mu_max I): pick the numerically larger row
  const cplx r0x = g00 - mu_max, r0y = g01;
  const cplx r1x = g10, r1y = g11 - mu_max;
  C2 v;
  if (std::norm(r0x) + std::norm(r0y) >= std::norm(r1x) + std::norm(r1y))
    v = {-r0y, r0x};
  else
    v = {-r1y, r1x};
  const double n = std::sqrt(norm_sq(v));
  v = (1.0 / n) * v;
  // fix the phase: make the largest-magnitude component real positive
  cplx lead = std::norm(v.x) >= std::norm(v.y) ? v.x : v.y;
  v = (std::conj(lead) / std::abs(lead)) * v;
  return {true, v};
}

// Angle between two complex lines given by unit vectors, in [0, pi/2].
inline double line_angle(const C2& u, const C2& v) {
  const cplx ip = std::conj(u.x) * v.x + std::conj(u.y) * v.y;
  const double c = std::min(1.0, std::abs(ip) / std::sqrt(norm_sq(u) * norm_sq(v)));
  return std::acos(c);
}

}  // namespace kummerlab
