#pragma once

// Central-difference evaluation of Kahler curvature components
//   R_{i jbar k lbar} = -d_i d_jbar g_{k lbar}
//                       + g^{p qbar} (d_i g)_{k qbar} (d_jbar g)_{p lbar}
// for 2x2 hermitian metric fields on torus coordinates.  For a split metric
// a(z1) i dz1 dz1bar + b(z2) i dz2 dz2bar the three components
// R_{2 2bar 1 1bar}, R_{1 1bar 1 2bar}, R_{1 2bar 2 2bar} vanish identically,
// Ricci-flat or not; the evaluator here recomputes them numerically.

#include <array>
#include <cmath>
#include <functional>

#include "kummerlab/common.hpp"
#include "kummerlab/hermspace.hpp"
#include "kummerlab/trigpoly.hpp"

namespace kummerlab {

namespace detail {

inline Mat2c to_mat(const HermitianForm& h) {
  Mat2c m;
  m.m[0][0] = h.a;
  m.m[0][1] = h.b;
  m.m[1][0] = std::conj(h.b);
  m.m[1][1] = h.d;
  return m;
}

inline Mat2c scaled_sum(cplx s1, const Mat2c& m1, cplx s2, const Mat2c& m2) {
  Mat2c r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = s1 * m1.m[i][j] + s2 * m2.m[i][j];
  return r;
}

template <class G>
Mat2c eval_at(G&& g, std::array<double, 4> x, int axis, double shift) {
  x[axis] += shift;
  return to_mat(g(x));
}

// central difference of the metric along one real axis
template <class G>
Mat2c fd_axis_first(G&& g, const std::array<double, 4>& x, int axis, double h) {
  const Mat2c plus = eval_at(g, x, axis, h);
  const Mat2c minus = eval_at(g, x, axis, -h);
  return scaled_sum(0.5 / h, plus, -0.5 / h, minus);
}

// same-axis second central difference
template <class G>
Mat2c fd_axis_second(G&& g, const std::array<double, 4>& x, int axis, double h) {
  const Mat2c plus = eval_at(g, x, axis, h);
  const Mat2c minus = eval_at(g, x, axis, -h);
  const Mat2c mid = to_mat(g(x));
  return scaled_sum(1.0 / (h * h), scaled_sum(1.0, plus, 1.0, minus), -2.0 / (h * h), mid);
}

// cross second difference d_u d_v with u != v
template <class G>
Mat2c fd_cross_second(G&& g, const std::array<double, 4>& x, int u, int v, double h) {
  auto at = [&](double su, double sv) {
    std::array<double, 4> y = x;
    y[u] += su;
    y[v] += sv;
    return to_mat(g(y));
  };
  const Mat2c pp = at(h, h), pm = at(h, -h), mp = at(-h, h), mm = at(-h, -h);
  const double w = 1.0 / (4.0 * h * h);
  return scaled_sum(w, scaled_sum(1.0, pp, 1.0, mm), -w, scaled_sum(1.0, pm, 1.0, mp));
}

}  // namespace detail

// d/dz_p of the metric (conjugate = false) or d/dzbar_p (conjugate = true);
// p in {0,1} selects the complex coordinate, whose real axes are 2p, 2p+1
template <class G>
Mat2c wirtinger_first(G&& g, const std::array<double, 4>& x, int p, bool conjugate, double h) {
  const Mat2c du = detail::fd_axis_first(g, x, 2 * p, h);
  const Mat2c dv = detail::fd_axis_first(g, x, 2 * p + 1, h);
  const cplx iu = conjugate ? cplx(0.0, 0.5) : cplx(0.0, -0.5);
  return detail::scaled_sum(0.5, du, iu, dv);
}

// d^2 / dz_p dzbar_q of the metric
template <class G>
Mat2c wirtinger_second_mixed(G&& g, const std::array<double, 4>& x, int p, int q, double h) {
  if (p == q) {
    const Mat2c uu = detail::fd_axis_second(g, x, 2 * p, h);
    const Mat2c vv = detail::fd_axis_second(g, x, 2 * p + 1, h);
    return detail::scaled_sum(0.25, uu, 0.25, vv);
  }
  const int u = 2 * p, v = 2 * p + 1;
  const int up = 2 * q, vp = 2 * q + 1;
  const Mat2c m_uu = detail::fd_cross_second(g, x, u, up, h);
  const Mat2c m_uv = detail::fd_cross_second(g, x, u, vp, h);
  const Mat2c m_vu = detail::fd_cross_second(g, x, v, up, h);
  const Mat2c m_vv = detail::fd_cross_second(g, x, v, vp, h);
  Mat2c r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r.m[i][j] = 0.25 * (m_uu.m[i][j] + m_vv.m[i][j]) +
                  cplx(0.0, 0.25) * (m_uv.m[i][j] - m_vu.m[i][j]);
  return r;
}

// One curvature component by central differences at the given step.
// Index arguments are 1-based complex coordinates matching the notation
// R_{i jbar k lbar}.
template <class G>
cplx curvature_component_fd(G&& g, const std::array<double, 4>& x, int i, int j, int k, int l,
                            double step) {
  const int ii = i - 1, jj = j - 1, kk = k - 1, ll = l - 1;
  const Mat2c g0 = detail::to_mat(g(x));
  const cplx det = g0.det();
  // g^{p qbar} = (G^{-1})_{q p}
  Mat2c ginv;
  ginv.m[0][0] = g0.m[1][1] / det;
  ginv.m[0][1] = -g0.m[0][1] / det;
  ginv.m[1][0] = -g0.m[1][0] / det;
  ginv.m[1][1] = g0.m[0][0] / det;

  const Mat2c d2 = wirtinger_second_mixed(g, x, ii, jj, step);
  const Mat2c di = wirtinger_first(g, x, ii, false, step);
  const Mat2c djb = wirtinger_first(g, x, jj, true, step);
  cplx sum{0.0, 0.0};
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) sum += ginv.m[q][p] * di.m[kk][q] * djb.m[p][ll];
  return -d2.m[kk][ll] + sum;
}

// Richardson extrapolation between steps h and h/2 (removes the leading
// O(h^2) truncation term)
template <class G>
cplx curvature_component_richardson(G&& g, const std::array<double, 4>& x, int i, int j, int k,
                                    int l, double step) {
  const cplx coarse = curvature_component_fd(g, x, i, j, k, l, step);
  const cplx fine = curvature_component_fd(g, x, i, j, k, l, 0.5 * step);
  return (4.0 * fine - coarse) / 3.0;
}

struct SplitCurvature {
  cplx r_2211;  // R_{2 2bar 1 1bar}
  cplx r_1112;  // R_{1 1bar 1 2bar}
  cplx r_1222;  // R_{1 2bar 2 2bar}
};

// metric a(z1) i dz1 dz1bar + b(z2) i dz2 dz2bar as an evaluator over torus
// coordinates; throws if a stencil evaluation leaves the positivity region
struct SplitMetric {
  TrigPoly2 a;
  TrigPoly2 b;

  HermitianForm operator()(const std::array<double, 4>& x) const {
    const double av = a({x[0], x[1]});
    const double bv = b({x[2], x[3]});
    if (!(av > 0.0) || !(bv > 0.0))
      throw EvaluationError("split metric: stencil leaves the positivity region");
    return {av, {0.0, 0.0}, bv};
  }
};

// The three displayed components for the split metric, Richardson-extrapolated
// from (step, step/2).
inline SplitCurvature split_metric_curvature(const TrigPoly2& a, const TrigPoly2& b,
                                             const std::array<double, 4>& x, double step) {
  if (!(step >= 1e-4 && step <= 1e-2))
    throw Error("split_metric_curvature: step must lie in [1e-4, 1e-2]");
  const SplitMetric g{a, b};
  SplitCurvature out;
  out.r_2211 = curvature_component_richardson(g, x, 2, 2, 1, 1, step);
  out.r_1112 = curvature_component_richardson(g, x, 1, 1, 1, 2, step);
  out.r_1222 = curvature_component_richardson(g, x, 1, 2, 2, 2, step);
  return out;
}

}  // namespace kummerlab
