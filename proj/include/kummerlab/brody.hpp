#pragma once

// Brody reparametrization of polynomial disc maps into C^2, the radial
// cutoff i del delbar computation, and disc-area quadratures.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "kummerlab/common.hpp"
#include "kummerlab/hermspace.hpp"

namespace kummerlab {

// polynomial map from the disc of the given radius into C^2
struct DiscMap {
  std::vector<cplx> c1;  // coefficients of the first component, degree order
  std::vector<cplx> c2;
  double radius = 1.0;

  static constexpr int kMaxDegree = 64;

  void validate() const {
    if (static_cast<int>(c1.size()) > kMaxDegree + 1 || static_cast<int>(c2.size()) > kMaxDegree + 1)
      throw Error("DiscMap: degree exceeds 64");
    if (!(radius > 0.0)) throw Error("DiscMap: radius must be positive");
  }

  C2 eval(cplx z) const { return {horner(c1, z), horner(c2, z)}; }

  C2 deriv(cplx z) const { return {horner_deriv(c1, z), horner_deriv(c2, z)}; }

  bool constant() const {
    for (std::size_t k = 1; k < c1.size(); ++k)
      if (c1[k] != cplx{0.0, 0.0}) return false;
    for (std::size_t k = 1; k < c2.size(); ++k)
      if (c2[k] != cplx{0.0, 0.0}) return false;
    return true;
  }

 private:
  static cplx horner(const std::vector<cplx>& c, cplx z) {
    cplx s{0.0, 0.0};
    for (std::size_t k = c.size(); k-- > 0;) s = s * z + c[k];
    return s;
  }
  static cplx horner_deriv(const std::vector<cplx>& c, cplx z) {
    cplx s{0.0, 0.0};
    for (std::size_t k = c.size(); k-- > 1;) s = s * z + static_cast<double>(k) * c[k];
    return s;
  }
};

// |D xi|(z) in the target metric omega
inline double map_speed(const DiscMap& xi, const HermitianForm& omega, cplx z) {
  return std::sqrt(std::max(0.0, omega(xi.deriv(z))));
}

// A disc map composed with the affine input change z -> y + z / a.
struct ReparametrizedMap {
  DiscMap base;
  cplx center{0.0, 0.0};
  double inv_scale = 1.0;  // 1 / a

  C2 eval(cplx z) const { return base.eval(center + z * inv_scale); }
  C2 deriv(cplx z) const {
    const C2 d = base.deriv(center + z * inv_scale);
    return {d.x * inv_scale, d.y * inv_scale};
  }
};

struct BrodyResult {
  ReparametrizedMap map;
  cplx maximizer{0.0, 0.0};   // y
  double scale = 0.0;         // a = |D xi|(y)
  double achieved_radius = 0.0;  // a (R - |y|) / 2
  double deriv_at_origin = 0.0;
  double sup_half_disc = 0.0;  // certified on the verification grid
};

// sup |D xi~| over the disc of the given radius, sampled on the boundary
// circle (the squared speed is subharmonic, so the boundary carries the
// maximum); throws unless the sup is within 2 + 1e-6
inline double certify_sup_bound(const ReparametrizedMap& map, const HermitianForm& omega,
                                double radius, int samples) {
  double sup = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double th = kTwoPi * k / samples;
    const cplx z = radius * cplx{std::cos(th), std::sin(th)};
    const C2 d = map.deriv(z);
    sup = std::max(sup, std::sqrt(std::max(0.0, omega(d))));
  }
  if (sup > 2.0 + 1e-6)
    throw CertificationError(
        "reparametrization: grid too coarse to certify the sup bound; sup |D xi~| = " +
        std::to_string(sup) + " > 2 on the disc of radius " + std::to_string(radius));
  return sup;
}

// Reparametrize around the maximizer of delta(z) = dist(z, boundary) |D xi|(z).
// The returned map has unit derivative at the origin and derivative at most 2
// on the disc of the achieved radius; both facts are re-verified on a finer
// grid than the search used, and failure to certify raises an error instead
// of returning an uncertified map.
inline BrodyResult brody_reparametrize(const DiscMap& xi, const HermitianForm& omega, int grid) {
  xi.validate();
  require_positive(omega, "brody_reparametrize");
  if (xi.constant()) throw DegenerateMapError("brody_reparametrize: constant map");
  if (grid < 16) throw Error("brody_reparametrize: grid must be at least 16");

  const double R = xi.radius;
  auto delta = [&](double x, double y) {
    const double rr = std::hypot(x, y);
    if (rr >= R) return 0.0;
    return (R - rr) * map_speed(xi, omega, {x, y});
  };

  // coarse grid scan; ties broken toward the origin, then lexicographically
  double best = -1.0, bx = 0.0, by = 0.0;
  const double cell = 2.0 * R / grid;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double x = -R + (i + 0.5) * cell;
      const double y = -R + (j + 0.5) * cell;
      const double v = delta(x, y);
      if (v > best * (1.0 + 1e-12)) {
        best = v;
        bx = x;
        by = y;
      } else if (v > best * (1.0 - 1e-12)) {
        const double rr = std::hypot(x, y), rb = std::hypot(bx, by);
        if (rr < rb - 1e-15 || (std::fabs(rr - rb) <= 1e-15 && std::pair{x, y} < std::pair{bx, by})) {
          best = std::max(best, v);
          bx = x;
          by = y;
        }
      }
    }

  // alternating golden-section refinement around the best cell
  double win = 2.0 * cell;
  for (int round = 0; round < 40; ++round) {
    bx = golden_section_max([&](double x) { return delta(x, by); }, bx - win, bx + win);
    by = golden_section_max([&](double y) { return delta(bx, y); }, by - win, by + win);
    win *= 0.5;
    if (win < 1e-14 * R) break;
  }

  BrodyResult out;
  out.maximizer = {bx, by};
  out.scale = map_speed(xi, omega, out.maximizer);
  if (!(out.scale > 0.0))
    throw DegenerateMapError("brody_reparametrize: vanishing derivative at the maximizer");
  const double r = R - std::abs(out.maximizer);
  out.achieved_radius = 0.5 * out.scale * r;
  out.map = ReparametrizedMap{xi, out.maximizer, 1.0 / out.scale};

  out.deriv_at_origin = omega(out.map.deriv({0.0, 0.0}));
  out.deriv_at_origin = std::sqrt(std::max(0.0, out.deriv_at_origin));

  // re-verify both contracts on a finer sampling than the search used
  if (std::fabs(out.deriv_at_origin - 1.0) > 1e-6)
    throw CertificationError("brody_reparametrize: |D xi~|(0) = " +
                             std::to_string(out.deriv_at_origin) + ", expected 1");
  out.sup_half_disc =
      certify_sup_bound(out.map, omega, out.achieved_radius, std::max(8 * grid, 4096));
  return out;
}

// ---------------------------------------------------------------------------
// Radial cutoff
// ---------------------------------------------------------------------------

// chi_r(z) = eta(|z|/r) with the C^2 quintic smoothstep profile: eta = 1 on
// [0,1], eta = 0 on [2,inf), both derivatives vanishing at the seams.
// |eta'| <= 15/8 and |eta''| <= 10/sqrt(3) on [1,2].
struct CutoffProfile {
  double r = 1.0;

  static double eta(double s) {
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    const double t = s - 1.0;
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
  }
  static double eta_prime(double s) {
    if (s <= 1.0 || s >= 2.0) return 0.0;
    const double t = s - 1.0;
    const double u = t * (1.0 - t);
    return -30.0 * u * u;
  }
  static double eta_second(double s) {
    if (s <= 1.0 || s >= 2.0) return 0.0;
    const double t = s - 1.0;
    return -60.0 * t * (2.0 * t - 1.0) * (t - 1.0);
  }

  double chi(cplx z) const { return eta(std::abs(z) / r); }
};

// density of i del delbar chi_r against i dz ^ dzbar:
// eta''/(4 r^2) + eta'/(4 r |z|), zero off the annulus r <= |z| <= 2r
// (the origin is a removable point since eta is locally constant there)
inline double cutoff_laplacian(const CutoffProfile& p, cplx z) {
  const double az = std::abs(z);
  const double s = az / p.r;
  if (s <= 1.0 || s >= 2.0) return 0.0;
  return CutoffProfile::eta_second(s) / (4.0 * p.r * p.r) +
         CutoffProfile::eta_prime(s) / (4.0 * p.r * az);
}

struct CutoffBound {
  double sup_times_r2 = 0.0;  // sup |i del delbar chi_r| * r^2
  double constant = 0.0;      // the r-independent C
};

// sup |i del delbar chi_r| * r^2, evaluated through the z-route; the value is
// independent of r, which is the content of the C/r^2 bound.
inline CutoffBound cutoff_bound_check(const CutoffProfile& p, int samples = 4096) {
  double sup = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double s = 1.0 + static_cast<double>(k) / samples;
    const double az = s * p.r;
    sup = std::max(sup, std::fabs(cutoff_laplacian(p, cplx{az, 0.0})) * p.r * p.r);
  }
  return {sup, sup};
}

// ---------------------------------------------------------------------------
// Disc areas
// ---------------------------------------------------------------------------

namespace detail {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

// integral of f(z) over the annulus [r0, r1] in polar coordinates, with
// Gauss-Legendre in the radius and a trapezoid (exact for trig polynomials)
// in the angle
template <class F>
double polar_integral(F&& f, double r0, double r1, int n_radial, int n_angular) {
  std::vector<double> xs, ws;
  gauss_legendre(n_radial, xs, ws);
  std::vector<double> ring(static_cast<std::size_t>(n_radial));
  std::vector<double> vals(static_cast<std::size_t>(n_angular));
  for (int i = 0; i < n_radial; ++i) {
    const double rho = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * xs[i];
    for (int k = 0; k < n_angular; ++k) {
      const double th = kTwoPi * k / n_angular;
      vals[static_cast<std::size_t>(k)] = f(cplx{rho * std::cos(th), rho * std::sin(th)});
    }
    ring[static_cast<std::size_t>(i)] =
        ws[i] * rho * pairwise_sum(vals) * (kTwoPi / n_angular);
  }
  return 0.5 * (r1 - r0) * pairwise_sum(ring);
}

}  // namespace detail

// integral of xi* omega over the disc of radius r; with the conventions here
// the map z -> (z, 0) against the identity form gives exactly pi r^2
inline double disc_area(const DiscMap& xi, const HermitianForm& omega, double r, int grid = 128) {
  xi.validate();
  require_positive(omega, "disc_area");
  if (!(r > 0.0 && r <= xi.radius)) throw Error("disc_area: radius outside the domain");
  auto density = [&](cplx z) {
    const C2 d = xi.deriv(z);
    return omega(d);
  };
  return detail::polar_integral(density, 0.0, r, grid, 2 * grid);
}

// integral of chi_r xi* omega over the supporting disc D_{2r}
inline double cutoff_area(const DiscMap& xi, const HermitianForm& omega, const CutoffProfile& p,
                          int grid = 128) {
  auto density = [&](cplx z) {
    const C2 d = xi.deriv(z);
    return p.chi(z) * omega(d);
  };
  // split at the smoothness seams of the profile
  return detail::polar_integral(density, 0.0, p.r, grid, 2 * grid) +
         detail::polar_integral(density, p.r, 2.0 * p.r, grid, 2 * grid);
}

// Kahler potential of a constant form: phi = h(w, w) / 2 in the evaluation
// convention, so that 4 d dbar (phi o xi) recovers twice the pullback density
inline double potential_of_constant_form(const HermitianForm& h, const C2& w) {
  return 0.5 * h(w);
}

// the integration-by-parts side: integral of (phi o xi) i del delbar chi_r
// over the annulus where the cutoff varies
inline double cutoff_area_by_parts(const DiscMap& xi, const HermitianForm& omega,
                                   const CutoffProfile& p, int grid = 128) {
  // i dz ^ dzbar = 2 dx ^ dy, hence the factor on the density
  auto density = [&](cplx z) {
    return 2.0 * potential_of_constant_form(omega, xi.eval(z)) * cutoff_laplacian(p, z);
  };
  return detail::polar_integral(density, p.r, 2.0 * p.r, grid, 2 * grid);
}

}  // namespace kummerlab
