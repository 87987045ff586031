#pragma once

// Coboundary detection and extraction for observables over a Kummer system,
// and the exponential-moment / tail machinery for their Birkhoff sums.
//
// The transfer solve replaces a weak-limit argument by regularized least
// squares: on a uniform grid the torus map permutes grid points exactly, so
// in Fourier space the normal equations decompose into independent cyclic
// tridiagonal systems along mode orbits and the solve is exact, fast, and
// deterministic.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kummerlab/cocycle.hpp"
#include "kummerlab/common.hpp"
#include "kummerlab/fft.hpp"
#include "kummerlab/metric_field.hpp"
#include "kummerlab/torus.hpp"
#include "kummerlab/trigpoly.hpp"

namespace kummerlab {

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

struct Observable {
  std::function<double(const TorusPoint&)> eval;
  std::optional<double> exact_mean;  // known analytically for trig polynomials
  std::string name;

  double operator()(const TorusPoint& p) const { return eval(p); }
};

inline Observable observable_from_trig(const TrigPoly4& phi, std::string name = "trig") {
  return {[phi](const TorusPoint& p) { return phi(p.c); }, phi.mean(), std::move(name)};
}

inline Observable observable_constant(double c) {
  return {[c](const TorusPoint&) { return c; }, c, "constant"};
}

// planted coboundary f = psi o T - psi
inline Observable observable_planted_coboundary(const KummerSystem& sys, const TrigPoly4& psi) {
  return {[&sys, psi](const TorusPoint& p) { return psi(sys.apply(p, 1).c) - psi(p.c); },
          0.0, "planted-coboundary"};
}

inline Observable observable_rho_u_centered(const MetricField& field) {
  const double half_h = 0.5 * field.system().entropy();
  return {[&field, half_h](const TorusPoint& p) { return rho_and_beta(field, p).rho_u - half_h; },
          std::nullopt, "rho_u-h/2"};
}

inline Observable observable_rho_diff_centered(const MetricField& field) {
  const double h = field.system().entropy();
  return {[&field, h](const TorusPoint& p) {
            const CocycleRecord r = rho_and_beta(field, p);
            return r.rho_u - r.rho_s - h;
          },
          std::nullopt, "rho_u-rho_s-h"};
}

// ---------------------------------------------------------------------------
// Birkhoff-sum L^2 profiles and the coboundary verdict
// ---------------------------------------------------------------------------

// || S_N f ||_{L^2} for N = 1..n_max, Monte Carlo over seeded initial points;
// entry [0] is zero padding
inline std::vector<double> l2_birkhoff_profile(const Observable& f, const KummerSystem& sys,
                                               std::uint64_t seed, int orbits, int n_max) {
  if (orbits < 100) throw Error("l2_birkhoff_profile: need at least 100 orbits");
  if (n_max < 1) throw Error("l2_birkhoff_profile: n_max must be positive");
  const auto starts = sys.sample_volume(seed, static_cast<std::size_t>(orbits));
  std::vector<std::vector<double>> sq(static_cast<std::size_t>(n_max) + 1);
  for (auto& v : sq) v.resize(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    TorusPoint p = starts[i];
    double s = 0.0;
    for (int N = 1; N <= n_max; ++N) {
      s += f(p);
      p = sys.apply(p, 1);
      sq[static_cast<std::size_t>(N)][i] = s * s;
    }
  }
  std::vector<double> profile(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int N = 1; N <= n_max; ++N)
    profile[static_cast<std::size_t>(N)] = std::sqrt(pairwise_mean(sq[static_cast<std::size_t>(N)]));
  return profile;
}

enum class CoboundaryKind { Coboundary, NotCoboundary, Inconclusive };

inline const char* to_string(CoboundaryKind k) {
  switch (k) {
    case CoboundaryKind::Coboundary: return "Coboundary";
    case CoboundaryKind::NotCoboundary: return "NotCoboundary";
    default: return "Inconclusive";
  }
}

struct CoboundaryVerdict {
  CoboundaryKind kind = CoboundaryKind::Inconclusive;
  double slope = 0.0;  // fitted log-log growth exponent of the profile
  double mean = 0.0;
  double mean_std_error = 0.0;
  std::string reason;
};

struct CoboundaryOptions {
  std::uint64_t seed = 1;
  int orbits = 400;
  int n_max = 100;
  double slope_coboundary = 0.1;   // below: bounded profile
  double slope_not = 0.4;          // above: CLT-scale growth or worse
};

// Classifies f by the growth of ||S_N f||_{L^2}.  A mean detectably nonzero
// (beyond 3 sigma) short-circuits to NotCoboundary; thresholds are this
// library's own calibration, tunable by the caller.
inline CoboundaryVerdict is_coboundary(const Observable& f, const KummerSystem& sys,
                                       const CoboundaryOptions& opt = {}) {
  CoboundaryVerdict v;
  const auto starts = sys.sample_volume(opt.seed, static_cast<std::size_t>(opt.orbits));
  std::vector<double> orbit_means(starts.size());
  std::vector<std::vector<double>> sq(static_cast<std::size_t>(opt.n_max) + 1);
  for (auto& w : sq) w.resize(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    TorusPoint p = starts[i];
    double s = 0.0;
    for (int N = 1; N <= opt.n_max; ++N) {
      s += f(p);
      p = sys.apply(p, 1);
      sq[static_cast<std::size_t>(N)][i] = s * s;
    }
    orbit_means[i] = s / opt.n_max;
  }

  if (f.exact_mean) {
    v.mean = *f.exact_mean;
    v.mean_std_error = 0.0;
  } else {
    const MeanAndError me = mean_and_error(orbit_means);
    v.mean = me.mean;
    v.mean_std_error = me.std_error;
  }

  std::vector<double> profile(static_cast<std::size_t>(opt.n_max) + 1, 0.0);
  double peak = 0.0;
  for (int N = 1; N <= opt.n_max; ++N) {
    profile[static_cast<std::size_t>(N)] =
        std::sqrt(pairwise_mean(sq[static_cast<std::size_t>(N)]));
    peak = std::max(peak, profile[static_cast<std::size_t>(N)]);
  }

  if (peak < 1e-13) {
    v.kind = CoboundaryKind::Coboundary;
    v.slope = 0.0;
    v.reason = "profile vanishes";
    return v;
  }

  // log-log least squares for the growth exponent
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int N = 1; N <= opt.n_max; ++N) {
    const double p = profile[static_cast<std::size_t>(N)];
    if (p <= 0.0) continue;
    const double lx = std::log(static_cast<double>(N)), ly = std::log(p);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 3) {
    v.kind = CoboundaryKind::Inconclusive;
    v.reason = "insufficient data";
    return v;
  }
  v.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  if (std::fabs(v.mean) > 3.0 * v.mean_std_error + 1e-14) {
    v.kind = CoboundaryKind::NotCoboundary;
    v.reason = "mean nonzero beyond 3 sigma";
    return v;
  }
  if (v.slope < opt.slope_coboundary) {
    v.kind = CoboundaryKind::Coboundary;
    v.reason = "bounded profile";
  } else if (v.slope > opt.slope_not) {
    v.kind = CoboundaryKind::NotCoboundary;
    v.reason = "diffusive or faster growth";
  } else {
    v.kind = CoboundaryKind::Inconclusive;
    v.reason = "growth exponent in the gray zone";
  }
  return v;
}

// ---------------------------------------------------------------------------
// Transfer solve: f = alpha o T - alpha in the least-squares sense
// ---------------------------------------------------------------------------

struct TransferSolution {
  int grid = 0;
  std::vector<double> alpha;  // grid samples, row-major, mean zero
  double residual_l2 = 0.0;
  double regularization = 0.0;

  std::size_t index(int i0, int i1, int i2, int i3) const {
    const auto g = static_cast<std::size_t>(grid);
    return ((static_cast<std::size_t>(i0) * g + static_cast<std::size_t>(i1)) * g +
            static_cast<std::size_t>(i2)) * g + static_cast<std::size_t>(i3);
  }
};

namespace detail {

// Solve the periodic tridiagonal system
//   -x_{m-1} + (2 + w_m) x_m - x_{m+1} = d_m   (indices mod n)
// in place.  Thomas elimination plus a Sherman-Morrison correction for the
// cyclic corners (B = A + u v^T with u = (-1,0,..,-1), v = (1,0,..,1), so A
// gains +1 on both corner diagonal entries).
inline void solve_cyclic_tridiag(std::vector<cplx>& d, const std::vector<double>& w) {
  const std::size_t n = d.size();
  if (n == 1) {
    d[0] /= w[0];
    return;
  }
  if (n == 2) {
    // the two off-diagonal couplings coincide: [2+w0, -2; -2, 2+w1]
    const double b0 = 2.0 + w[0], b1 = 2.0 + w[1];
    const double det = b0 * b1 - 4.0;
    const cplx x0 = (b1 * d[0] + 2.0 * d[1]) / det;
    const cplx x1 = (2.0 * d[0] + b0 * d[1]) / det;
    d[0] = x0;
    d[1] = x1;
    return;
  }
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = 2.0 + w[i];
  diag[0] += 1.0;
  diag[n - 1] += 1.0;
  auto thomas = [&](std::vector<cplx>& rhs) {
    std::vector<double> cp(n);
    cp[0] = -1.0 / diag[0];
    rhs[0] /= diag[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double m = 1.0 / (diag[i] + cp[i - 1]);
      cp[i] = -1.0 * m;
      rhs[i] = (rhs[i] + rhs[i - 1]) * m;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cp[i] * rhs[i + 1];
  };
  std::vector<cplx> q(n, cplx{0.0, 0.0});
  q[0] = cplx{-1.0, 0.0};
  q[n - 1] = cplx{-1.0, 0.0};
  thomas(d);
  thomas(q);
  const cplx fac = (d[0] + d[n - 1]) / (1.0 + q[0] + q[n - 1]);
  for (std::size_t i = 0; i < n; ++i) d[i] -= fac * q[i];
}

}  // namespace detail

// Least-squares minimization of sum over the grid of
// (f(x) - alpha(Tx) + alpha(x))^2 + reg * ||alpha||_{H}^2 with mean(alpha) = 0.
// T maps grid points to grid points exactly (integer matrix), so the problem
// is solved in closed form along the Fourier-mode orbits of the map.
//
// The penalty is smoothness-weighted, ||alpha||_H^2 = sum (1+|k|^2)^3
// |alpha_k|^2: the grid map has finite mode cycles, so the unweighted
// normal system is singular along cycle-constant directions that the
// continuum problem does not have, and plain Tikhonov would resolve them by
// subtracting per-cycle means from the true smooth solution.  The weights
// push that ambiguity onto the high modes, where the true solution carries
// no mass.
inline TransferSolution solve_transfer(const Observable& f, const KummerSystem& sys, int grid,
                                       double reg = 1e-9) {
  if (grid < 16) throw Error("solve_transfer: grid must be at least 16 per axis");
  if (!detail::is_pow2(grid)) throw Error("solve_transfer: grid must be a power of two");
  if (!(reg > 0.0))
    throw Error("solve_transfer: regularization must be positive (the normal system is singular "
                "along map-invariant modes without it)");

  const int g = grid;
  const std::size_t total = static_cast<std::size_t>(g) * g * g * g;
  std::vector<cplx> spec(total);
  {
    const double inv_g = 1.0 / g;
    std::size_t idx = 0;
    for (int i0 = 0; i0 < g; ++i0)
      for (int i1 = 0; i1 < g; ++i1)
        for (int i2 = 0; i2 < g; ++i2)
          for (int i3 = 0; i3 < g; ++i3) {
            const TorusPoint p{{i0 * inv_g, i1 * inv_g, i2 * inv_g, i3 * inv_g}};
            spec[idx++] = cplx(f(p), 0.0);
          }
  }
  detail::fft4(spec, g, -1);
  const double scale = 1.0 / static_cast<double>(total);
  for (auto& z : spec) z *= scale;

  // sigma(k) = A^T k mod g on mode indices
  const auto& A = sys.real_matrix();
  auto sigma = [&](std::array<int, 4> k) {
    std::array<int, 4> r{};
    for (int i = 0; i < 4; ++i) {
      std::int64_t s = 0;
      for (int j = 0; j < 4; ++j) s += A[j][i] * k[j];
      const std::int64_t m = ((s % g) + g) % g;
      r[i] = static_cast<int>(m);
    }
    return r;
  };
  auto flat = [&](const std::array<int, 4>& k) {
    return ((static_cast<std::size_t>(k[0]) * g + k[1]) * g + k[2]) * static_cast<std::size_t>(g) +
           k[3];
  };

  // smoothness weight of a mode index, with symmetric frequencies
  auto sobolev_weight = [&](std::size_t idx) {
    double k2 = 0.0;
    std::size_t rest = idx;
    for (int axis = 3; axis >= 0; --axis) {
      int ki = static_cast<int>(rest % static_cast<std::size_t>(g));
      rest /= static_cast<std::size_t>(g);
      if (ki > g / 2) ki -= g;
      k2 += static_cast<double>(ki) * ki;
    }
    return (1.0 + k2) * (1.0 + k2) * (1.0 + k2);
  };

  std::vector<cplx> alpha_hat(total, cplx{0.0, 0.0});
  std::vector<char> visited(total, 0);
  visited[0] = 1;  // mean-zero constraint: the constant mode stays 0
  std::vector<std::size_t> cycle;
  std::vector<cplx> rhs;
  std::vector<double> weights;
  for (std::size_t start = 1; start < total; ++start) {
    if (visited[start]) continue;
    cycle.clear();
    std::array<int, 4> k{static_cast<int>(start / (static_cast<std::size_t>(g) * g * g)) % g,
                         static_cast<int>(start / (static_cast<std::size_t>(g) * g)) % g,
                         static_cast<int>(start / static_cast<std::size_t>(g)) % g,
                         static_cast<int>(start % static_cast<std::size_t>(g))};
    std::size_t idx = start;
    do {
      visited[idx] = 1;
      cycle.push_back(idx);
      k = sigma(k);
      idx = flat(k);
    } while (idx != start);
    const std::size_t L = cycle.size();
    rhs.assign(L, cplx{0.0, 0.0});
    weights.assign(L, 0.0);
    for (std::size_t j = 0; j < L; ++j) {
      const std::size_t next = cycle[(j + 1) % L];
      rhs[j] = spec[next] - spec[cycle[j]];
      weights[j] = reg * sobolev_weight(cycle[j]);
    }
    detail::solve_cyclic_tridiag(rhs, weights);
    for (std::size_t j = 0; j < L; ++j) alpha_hat[cycle[j]] = rhs[j];
  }

  detail::fft4(alpha_hat, g, +1);
  TransferSolution sol;
  sol.grid = g;
  sol.regularization = reg;
  sol.alpha.resize(total);
  for (std::size_t i = 0; i < total; ++i) sol.alpha[i] = alpha_hat[i].real();

  // residual on the grid; Tx is again a grid point
  auto grid_image = [&](int i0, int i1, int i2, int i3) {
    const std::array<int, 4> j{i0, i1, i2, i3};
    std::array<int, 4> r{};
    for (int a = 0; a < 4; ++a) {
      std::int64_t s = 0;
      for (int b = 0; b < 4; ++b) s += A[a][b] * j[b];
      r[a] = static_cast<int>(((s % g) + g) % g);
    }
    return flat(r);
  };
  std::vector<double> rsq(total);
  {
    const double inv_g = 1.0 / g;
    std::size_t idx = 0;
    for (int i0 = 0; i0 < g; ++i0)
      for (int i1 = 0; i1 < g; ++i1)
        for (int i2 = 0; i2 < g; ++i2)
          for (int i3 = 0; i3 < g; ++i3) {
            const TorusPoint p{{i0 * inv_g, i1 * inv_g, i2 * inv_g, i3 * inv_g}};
            const double r = f(p) - sol.alpha[grid_image(i0, i1, i2, i3)] + sol.alpha[idx];
            rsq[idx] = r * r;
            ++idx;
          }
  }
  sol.residual_l2 = std::sqrt(pairwise_mean(rsq));
  return sol;
}

// ---------------------------------------------------------------------------
// Exponential moments and tails of Birkhoff sums
// ---------------------------------------------------------------------------

struct ExpMomentRow {
  int N = 0;
  double log_plain = 0.0;      // log of the estimate of int e^{S_N f}
  double plain = 0.0;          // exp of the above (inf if it overflows)
  double plain_rel_se = 0.0;   // relative standard error
  double log_gamma_abs = 0.0;  // log of the estimate of int e^{gamma |S_N f|}
  double gamma_abs = 0.0;
  double gamma_abs_rel_se = 0.0;
};

namespace detail {

// mean of e^{v_i} in log space; also the relative standard error
inline std::pair<double, double> log_mean_exp(std::span<const double> v) {
  double mx = -1e300;
  for (double x : v) mx = std::max(mx, x);
  std::vector<double> shifted(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) shifted[i] = std::exp(v[i] - mx);
  const MeanAndError me = mean_and_error(shifted);
  return {mx + std::log(me.mean), me.std_error / me.mean};
}

}  // namespace detail

// Monte-Carlo table of exponential moments of S_N f for N = 1..n_max.  All
// accumulation happens in log space, so nothing overflows.  In certification
// mode gamma must lie in (0, 1/6).
inline std::vector<ExpMomentRow> exp_moment_check(const Observable& f, const KummerSystem& sys,
                                                  double gamma, int n_max, std::uint64_t seed,
                                                  int samples, bool certify = true) {
  if (certify && !(gamma > 0.0 && gamma < 1.0 / 6.0))
    throw Error("exp_moment_check: certification requires 0 < gamma < 1/6");
  if (samples < 2) throw Error("exp_moment_check: need at least 2 samples");
  const auto starts = sys.sample_volume(seed, static_cast<std::size_t>(samples));
  std::vector<TorusPoint> pts = starts;
  std::vector<double> sums(starts.size(), 0.0);
  std::vector<double> plain(starts.size()), gabs(starts.size());
  std::vector<ExpMomentRow> table;
  table.reserve(static_cast<std::size_t>(n_max));
  for (int N = 1; N <= n_max; ++N) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      sums[i] += f(pts[i]);
      pts[i] = sys.apply(pts[i], 1);
      plain[i] = sums[i];
      gabs[i] = gamma * std::fabs(sums[i]);
    }
    ExpMomentRow row;
    row.N = N;
    const auto [lp, sep] = detail::log_mean_exp(plain);
    const auto [lg, seg] = detail::log_mean_exp(gabs);
    row.log_plain = lp;
    row.plain = lp < 700.0 ? std::exp(lp) : std::numeric_limits<double>::infinity();
    row.plain_rel_se = sep;
    row.log_gamma_abs = lg;
    row.gamma_abs = lg < 700.0 ? std::exp(lg) : std::numeric_limits<double>::infinity();
    row.gamma_abs_rel_se = seg;
    table.push_back(row);
  }
  return table;
}

struct TailRow {
  double L = 0.0;
  double empirical = 0.0;  // fraction of samples with S_N f >= L
  double bound = 0.0;      // C e^{-L}
  double binom_se = 0.0;
  bool pass = false;
};

// Chebyshev-Markov tail table at a fixed N: the empirical mass of
// {S_N f >= L} against C e^{-L} with a 3-sigma binomial allowance.
inline std::vector<TailRow> tail_bound_check(const Observable& f, const KummerSystem& sys,
                                             std::span<const double> L_values, int N,
                                             std::uint64_t seed, int samples, double C) {
  if (samples < 2) throw Error("tail_bound_check: need at least 2 samples");
  const auto starts = sys.sample_volume(seed, static_cast<std::size_t>(samples));
  std::vector<double> sums(starts.size(), 0.0);
  for (std::size_t i = 0; i < starts.size(); ++i) {
    TorusPoint p = starts[i];
    double s = 0.0;
    for (int k = 0; k < N; ++k) {
      s += f(p);
      p = sys.apply(p, 1);
    }
    sums[i] = s;
  }
  std::vector<TailRow> rows;
  rows.reserve(L_values.size());
  for (double L : L_values) {
    TailRow r;
    r.L = L;
    std::size_t hits = 0;
    for (double s : sums)
      if (s >= L) ++hits;
    r.empirical = static_cast<double>(hits) / static_cast<double>(sums.size());
    r.bound = C * std::exp(-L);
    r.binom_se = std::sqrt(std::max(r.empirical * (1.0 - r.empirical), 0.0) /
                           static_cast<double>(sums.size()));
    r.pass = r.empirical <= r.bound + 3.0 * r.binom_se;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace kummerlab
