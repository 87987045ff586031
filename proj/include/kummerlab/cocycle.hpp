#pragma once

// Expansion factors and the cocycle functions rho_u, rho_s, beta of a metric
// field over a Kummer system, with the coboundary and distance identities
// they satisfy, plus the cohomological wedge-integral check.
//
// All per-point quantities are computed from determinant-normalized forms
// expressed in the system's unimodular eigenframe.  In that frame the
// pullback by M^N is the diagonal scaling diag(lu^N, ls^N), so entries of
// pulled-back forms are clean products with no cancellation even at large N.

#include <array>
#include <cmath>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "kummerlab/common.hpp"
#include "kummerlab/hermspace.hpp"
#include "kummerlab/metric_field.hpp"
#include "kummerlab/torus.hpp"
#include "kummerlab/trigpoly.hpp"

namespace kummerlab {

// field value at p, determinant-normalized and expressed in the eigenframe
inline HermitianForm frame_form(const MetricField& field, const TorusPoint& p) {
  return express_in_frame(normalized(field.evaluate_checked(p)), field.system().frame());
}

// pullback by M^N of a form given in the eigenframe: diagonal congruence
inline HermitianForm frame_pullback(const KummerSystem& sys, const HermitianForm& h, int n) {
  const double lu = std::pow(sys.unstable_eigenvalue(), n);
  const double ls = std::pow(sys.stable_eigenvalue(), n);
  return {lu * lu * h.a, lu * ls * h.b, ls * ls * h.d};
}

// lambda(x, N): half the hyperbolic distance between the metric at x and its
// N-step pullback, both determinant-normalized.  Identically N h / 2 for the
// flat field.
inline double expansion_factor(const MetricField& field, const TorusPoint& x, int N) {
  if (N == 0) return 0.0;
  const KummerSystem& sys = field.system();
  const HermitianForm h0 = frame_form(field, x);
  const HermitianForm hN = frame_pullback(sys, frame_form(field, sys.apply(x, N)), N);
  return 0.5 * dist(h0, hN);
}

struct CocycleRecord {
  double lambda_1 = 0.0;  // lambda(x, 1)
  double rho_u = 0.0;
  double rho_s = 0.0;
  double beta = 0.0;
};

// One-step cocycle data at x in the unimodular eigenframe:
//   rho_u = (1/2) log(a_h / a_0),  rho_s = (1/2) log(d_h / d_0),
//   beta  = (1/2) log(a_0 d_0 / det)
// with entries of the normalized forms, so beta >= 0 always and the
// coboundary identity below holds for fields of any pointwise volume.
inline CocycleRecord rho_and_beta(const MetricField& field, const TorusPoint& x) {
  const KummerSystem& sys = field.system();
  const HermitianForm H0 = frame_form(field, x);
  const HermitianForm H1 = frame_pullback(sys, frame_form(field, sys.apply(x, 1)), 1);
  CocycleRecord r;
  r.rho_u = 0.5 * std::log(H1.a / H0.a);
  r.rho_s = 0.5 * std::log(H1.d / H0.d);
  r.beta = 0.5 * std::log(H0.a * H0.d / H0.det());
  r.lambda_1 = 0.5 * dist(H0, H1);
  return r;
}

// beta(Tx) - beta(x) - rho_u(x) - rho_s(x); zero up to rounding for every
// field and point
inline double coboundary_identity_residual(const MetricField& field, const TorusPoint& x) {
  const KummerSystem& sys = field.system();
  const CocycleRecord here = rho_and_beta(field, x);
  const CocycleRecord next = rho_and_beta(field, sys.apply(x, 1));
  return next.beta - here.beta - here.rho_u - here.rho_s;
}

// S_N f(x) = f(x) + f(Tx) + ... + f(T^{N-1} x)
template <class F>
double birkhoff_sum(F&& f, const KummerSystem& sys, const TorusPoint& x, int N) {
  double s = 0.0;
  TorusPoint p = x;
  for (int k = 0; k < N; ++k) {
    s += f(p);
    p = sys.apply(p, 1);
  }
  return s;
}

struct DistIdentityReport {
  double dist_theta = 0.0;      // dist(theta_0, theta_Nh) on the eigen-geodesic
  double birkhoff_diff = 0.0;   // |S_N rho_u - S_N rho_s|
  double residual = 0.0;        // |dist_theta - birkhoff_diff|
  double lambda_N = 0.0;
  double contraction_slack = 0.0;  // 2 lambda_N - birkhoff_diff (>= 0 up to rounding)
};

// Checks dist(theta_0, theta_Nh) = |S_N rho_u - S_N rho_s| <= 2 lambda(x,N),
// where theta are the geodesic projections of the endpoint metrics.
inline DistIdentityReport dist_identity_residual(const MetricField& field, const TorusPoint& x,
                                                 int N) {
  const KummerSystem& sys = field.system();
  DistIdentityReport rep;
  TorusPoint p = x;
  double su = 0.0, ss = 0.0;
  for (int k = 0; k < N; ++k) {
    const CocycleRecord r = rho_and_beta(field, p);
    su += r.rho_u;
    ss += r.rho_s;
    p = sys.apply(p, 1);
  }
  const HermitianForm H0 = frame_form(field, x);
  const HermitianForm HN = frame_pullback(sys, frame_form(field, sys.apply(x, N)), N);
  const HermitianForm theta0 = project_to_geodesic(normalized(H0), sys.splitting());
  const HermitianForm thetaN = project_to_geodesic(normalized(HN), sys.splitting());
  rep.dist_theta = dist(theta0, thetaN);
  rep.birkhoff_diff = std::fabs(su - ss);
  rep.residual = std::fabs(rep.dist_theta - rep.birkhoff_diff);
  rep.lambda_N = expansion_factor(field, x, N);
  rep.contraction_slack = 2.0 * rep.lambda_N - rep.birkhoff_diff;
  return rep;
}

// unstable-entry telescoping: S_N rho_u = (1/2) log(a_Nh / a_0)
inline double telescoped_rho_u(const MetricField& field, const TorusPoint& x, int N) {
  const KummerSystem& sys = field.system();
  const HermitianForm H0 = frame_form(field, x);
  const HermitianForm HN = frame_pullback(sys, frame_form(field, sys.apply(x, N)), N);
  return 0.5 * std::log(HN.a / H0.a);
}

// ---------------------------------------------------------------------------
// Cohomological wedge integral
// ---------------------------------------------------------------------------

struct JensenReport {
  double integral = 0.0;     // grid quadrature of (omega_1 ^ (T^N)* omega_2) / dVol
  double target = 0.0;       // e^{Nh} + e^{-Nh}
  double jensen_gap = 0.0;   // log(integral) - mean log(density); 0 iff density constant
  int grid = 0;
};

namespace detail {

// Uniform-grid quadrature of a trig polynomial is its true integral plus the
// sum of coefficients at nonzero modes divisible by the grid size in every
// component.  Refuse the grid unless no integrand mode aliases to zero.
inline void require_alias_free(const std::vector<std::array<int, 4>>& modes, int grid) {
  for (const auto& m : modes) {
    bool zero = true, aliased = true;
    for (int i = 0; i < 4; ++i) {
      zero = zero && m[i] == 0;
      aliased = aliased && m[i] % grid == 0;
    }
    if (!zero && aliased)
      throw AliasingError("quadrature grid " + std::to_string(grid) +
                          " aliases integrand mode (" + std::to_string(m[0]) + "," +
                          std::to_string(m[1]) + "," + std::to_string(m[2]) + "," +
                          std::to_string(m[3]) + ") to the constant mode");
  }
}

}  // namespace detail

// Quadrature of omega_{phi1} ^ (T^N)*(omega_{phi2}) over the torus.  The
// pullback is exact (linear map on modes), the integrand is a trig
// polynomial, and grid validity is enforced against the actual integrand
// spectrum, so a passing grid integrates exactly.
inline JensenReport jensen_integral_check(const MetricField& field1, const MetricField& field2,
                                          int N, int grid) {
  if (grid < 2) throw Error("jensen_integral_check: grid must be at least 2");
  const KummerSystem& sys = field1.system();
  if (&sys != &field2.system())
    throw Error("jensen_integral_check: fields must share a system");

  // integrand spectrum: modes of phi1, pulled-back modes of phi2, and sums
  // and differences from the bilinear wedge
  const auto A_N = sys.real_power(N);
  const TrigPoly4 phi2_pulled = compose_linear(field2.potential(), A_N);
  std::vector<std::array<int, 4>> modes;
  auto canonical = [](std::array<int, 4> m) {
    for (int i = 0; i < 4; ++i) {
      if (m[i] != 0) {
        if (m[i] < 0)
          for (int j = 0; j < 4; ++j) m[j] = -m[j];
        break;
      }
    }
    return m;
  };
  for (const auto& a : field1.potential().modes) modes.push_back(canonical(a.m));
  for (const auto& b : phi2_pulled.modes) modes.push_back(canonical(b.m));
  for (const auto& a : field1.potential().modes)
    for (const auto& b : phi2_pulled.modes) {
      std::array<int, 4> sum{}, dif{};
      for (int i = 0; i < 4; ++i) {
        sum[i] = a.m[i] + b.m[i];
        dif[i] = a.m[i] - b.m[i];
      }
      modes.push_back(canonical(sum));
      modes.push_back(canonical(dif));
    }
  detail::require_alias_free(modes, grid);

  const Mat2c MN = (N >= 0 ? ipow(sys.matrix(), N) : ipow(sys.matrix().inverse(), -N)).complexified();
  const std::size_t total = static_cast<std::size_t>(grid) * grid * grid * grid;
  std::vector<double> w(total), lw(total);
  std::size_t idx = 0;
  const double inv_g = 1.0 / grid;
  for (int i0 = 0; i0 < grid; ++i0)
    for (int i1 = 0; i1 < grid; ++i1)
      for (int i2 = 0; i2 < grid; ++i2)
        for (int i3 = 0; i3 < grid; ++i3) {
          const TorusPoint p{{i0 * inv_g, i1 * inv_g, i2 * inv_g, i3 * inv_g}};
          const HermitianForm h1 = field1.evaluate_checked(p);
          const HermitianForm h2 =
              apply_linear(MN, field2.evaluate_checked(sys.apply(p, N)));
          const double density = wedge_ratio(h1, h2);
          if (!(density > 0.0))
            throw EvaluationError("jensen_integral_check: nonpositive wedge density");
          w[idx] = density;
          lw[idx] = std::log(density);
          ++idx;
        }
  JensenReport rep;
  rep.grid = grid;
  rep.integral = pairwise_mean(w);
  const double nh = N * sys.entropy();
  rep.target = std::exp(nh) + std::exp(-nh);
  rep.jensen_gap = std::log(rep.integral) - pairwise_mean(lw);
  return rep;
}

}  // namespace kummerlab
