// kummerlab command-line interface: every verification in the library as a
// subcommand with deterministic seeding and CSV/JSON artifacts.
//
// Exit codes: 0 all contracted tolerances pass, 1 a numerical contract
// failed, 2 configuration or usage error (no partial artifacts are written).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kummerlab/brody.hpp"
#include "kummerlab/cobsolve.hpp"
#include "kummerlab/cocycle.hpp"
#include "kummerlab/curvature.hpp"
#include "kummerlab/io.hpp"
#include "kummerlab/metric_field.hpp"
#include "kummerlab/torus.hpp"
#include "kummerlab/wehler.hpp"

using namespace kummerlab;
using nlohmann::json;

namespace {

struct Verdict {
  std::string check;
  bool pass = true;
  double statistic = 0.0;
  double threshold = 0.0;
  std::uint64_t seed = 0;
  json extra = json::object();
};

struct Artifact {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct Options {
  std::vector<std::int64_t> matrix;
  double slope_coboundary = 0.1;
  double slope_not = 0.4;  // a b c d
  std::string config_path;
  std::string metric_path;
  std::string metric2_path;
  std::string surface_path;
  std::string discmap_path;
  std::string observable = "planted";
  int N = 10;
  int grid = 16;
  int samples = 1000;
  int count = 100;
  int seeds = 1;
  std::uint64_t seed = 1;
  double gamma = 0.15;
  double tol = -1.0;  // subcommand default applies when negative
  double reg = 1e-9;
  double step = 1e-3;
  double coeff = 0.2;
  std::string out;
  std::string format = "csv";
};

// invalid system matrices are configuration errors, not contract failures
KummerSystem make_system_checked(const Mat2i& m) {
  try {
    return KummerSystem::make(m);
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

Mat2i resolve_matrix(const Options& o, bool matrix_given) {
  if (matrix_given) {
    if (o.matrix.size() != 4) throw ParseError("--matrix needs four integers a b c d");
    return Mat2i{{{o.matrix[0], o.matrix[1]}, {o.matrix[2], o.matrix[3]}}};
  }
  if (!o.config_path.empty()) return io::load_system_spec(o.config_path).matrix;
  return Mat2i{{{2, 1}, {1, 1}}};
}

std::uint64_t resolve_seed(const Options& o, bool seed_given) {
  if (!seed_given && !o.config_path.empty()) return io::load_system_spec(o.config_path).seed;
  return o.seed;
}

MetricField load_field(const KummerSystem& sys, const std::string& path) {
  if (path.empty()) return MetricField(sys, TrigPoly4{});
  return MetricField(sys, io::load_potential(path));
}

void write_artifact(const Options& o, const Verdict& v, const Artifact& table) {
  std::string path = o.out;
  if (path.empty()) path = v.check + "." + o.format;
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open output file: " + path);
  if (o.format == "csv") {
    io::CsvWriter csv(out, table.header);
    for (const auto& r : table.rows) csv.row(r);
  } else {
    json j;
    j["check"] = v.check;
    j["verdict"] = v.pass ? "PASS" : "FAIL";
    j["statistic"] = v.statistic;
    j["threshold"] = v.threshold;
    j["seed"] = v.seed;
    for (auto& [key, val] : v.extra.items()) j[key] = val;
    j["columns"] = table.header;
    j["rows"] = table.rows;
    out << j.dump(2) << "\n";
  }
}

int finish(const Options& o, const Verdict& v, const Artifact& table) {
  write_artifact(o, v, table);
  std::cout << (v.pass ? "PASS" : "FAIL") << " check=" << v.check
            << " statistic=" << io::format_double(v.statistic)
            << " threshold=" << io::format_double(v.threshold) << " seed=" << v.seed << "\n";
  return v.pass ? 0 : 1;
}

Observable resolve_observable(const Options& o, const KummerSystem& sys,
                              std::optional<MetricField>& field_store) {
  if (o.observable == "planted") {
    const TrigPoly4 psi({{{1, 0, 1, 0}, o.coeff}});
    return observable_planted_coboundary(sys, psi);
  }
  if (o.observable == "cos1") {
    return observable_from_trig(TrigPoly4({{{1, 0, 0, 0}, o.coeff}}), "cos1");
  }
  if (o.observable == "constant") return observable_constant(o.coeff);
  if (o.observable == "rho-u" || o.observable == "rho-diff") {
    field_store.emplace(load_field(sys, o.metric_path));
    return o.observable == "rho-u" ? observable_rho_u_centered(*field_store)
                                   : observable_rho_diff_centered(*field_store);
  }
  throw ParseError("unknown observable '" + o.observable +
                   "' (expected planted|cos1|constant|rho-u|rho-diff)");
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

int run_dist(const Options& o, const std::vector<double>& h1v, const std::vector<double>& h2v) {
  const HermitianForm h1{h1v[0], {h1v[1], h1v[2]}, h1v[3]};
  const HermitianForm h2{h2v[0], {h2v[1], h2v[2]}, h2v[3]};
  const double d = dist(h1, h2);
  const double w = wedge_ratio(h1, h2);
  Verdict v{"dist", true, d, 0.0, 0};
  Artifact table{{"dist", "wedge_ratio"}, {{d, w}}};
  return finish(o, v, table);
}

int run_project(const Options& o, const std::vector<double>& hv) {
  const HermitianForm h{hv[0], {hv[1], hv[2]}, hv[3]};
  const auto frame = UnimodularFrame::make({cplx{1.0, 0.0}, cplx{0.0, 0.0}},
                                           {cplx{0.0, 0.0}, cplx{1.0, 0.0}});
  const auto g = GeodesicSplitting::make(frame);
  const HermitianForm p = project_to_geodesic(h, g);
  const HermitianForm pp = project_to_geodesic(p, g);
  const double idem = std::fabs(p.a - pp.a) + std::fabs(p.d - pp.d);
  Verdict v{"project", idem < 1e-12, idem, 1e-12, 0};
  Artifact table{{"proj_a", "proj_d", "idempotence_residual"}, {{p.a, p.d, idem}}};
  return finish(o, v, table);
}

int run_verify_flat(const Options& o, bool matrix_given, bool seed_given) {
  const double tol = o.tol > 0 ? o.tol : 1e-10;
  const KummerSystem sys = make_system_checked(resolve_matrix(o, matrix_given));
  const std::uint64_t seed = resolve_seed(o, seed_given);
  const MetricField flat(sys, TrigPoly4{});
  const double h = sys.entropy();
  const auto pts = sys.sample_volume(seed, static_cast<std::size_t>(o.samples));
  Artifact table{{"n", "target", "max_abs_error"}, {}};
  double worst = 0.0;
  for (int n = 1; n <= o.N; ++n) {
    double worst_n = 0.0;
    for (const TorusPoint& p : pts)
      worst_n = std::max(worst_n, std::fabs(expansion_factor(flat, p, n) - n * h / 2.0));
    worst = std::max(worst, worst_n);
    table.rows.push_back({static_cast<double>(n), n * h / 2.0, worst_n});
  }
  Verdict v{"verify-flat", worst < tol, worst, tol, seed};
  return finish(o, v, table);
}

int run_verify_jensen(const Options& o, bool matrix_given, bool seed_given) {
  const double tol = o.tol > 0 ? o.tol : 1e-8;
  const KummerSystem sys = make_system_checked(resolve_matrix(o, matrix_given));
  const MetricField f1 = load_field(sys, o.metric_path);
  const MetricField f2 =
      o.metric2_path.empty() ? load_field(sys, o.metric_path) : load_field(sys, o.metric2_path);
  Artifact table{{"N", "integral", "target", "abs_error", "jensen_gap"}, {}};
  double worst = 0.0;
  for (int n = 1; n <= o.N; ++n) {
    const JensenReport rep = jensen_integral_check(f1, f2, n, o.grid);
    const double err = std::fabs(rep.integral - rep.target);
    worst = std::max(worst, err);
    table.rows.push_back({static_cast<double>(n), rep.integral, rep.target, err, rep.jensen_gap});
  }
  Verdict v{"verify-jensen", worst < tol, worst, tol, resolve_seed(o, seed_given)};
  return finish(o, v, table);
}

int run_verify_cocycle(const Options& o, bool matrix_given, bool seed_given) {
  const double tol = o.tol > 0 ? o.tol : 1e-10;
  const double tol_dist = 1e-9;
  const KummerSystem sys = make_system_checked(resolve_matrix(o, matrix_given));
  const std::uint64_t seed = resolve_seed(o, seed_given);
  const MetricField field = load_field(sys, o.metric_path);
  const auto pts = sys.sample_volume(seed, static_cast<std::size_t>(o.samples));

  double worst_cob = 0.0, worst_dist = 0.0, worst_contr = 0.0;
  for (const TorusPoint& p : pts) {
    worst_cob = std::max(worst_cob, std::fabs(coboundary_identity_residual(field, p)));
    const DistIdentityReport rep = dist_identity_residual(field, p, o.N);
    worst_dist = std::max(worst_dist, rep.residual);
    worst_contr = std::max(worst_contr, -rep.contraction_slack);
  }

  // orbit sweep artifact for the first sample point
  Artifact table{{"n", "x1re", "x1im", "x2re", "x2im", "lambdaN", "rho_u", "rho_s", "beta",
                  "residual"},
                 {}};
  TorusPoint p = pts.empty() ? TorusPoint{} : pts[0];
  for (int n = 0; n < o.N; ++n) {
    const CocycleRecord r = rho_and_beta(field, p);
    const double res = coboundary_identity_residual(field, p);
    table.rows.push_back({static_cast<double>(n), p.c[0], p.c[1], p.c[2], p.c[3], r.lambda_1,
                          r.rho_u, r.rho_s, r.beta, res});
    p = sys.apply(p, 1);
  }

  const bool pass = worst_cob < tol && worst_dist < tol_dist && worst_contr < tol_dist;
  Verdict v{"verify-cocycle", pass, worst_cob, tol, seed};
  v.extra["dist_identity_residual"] = worst_dist;
  v.extra["contraction_violation"] = worst_contr;
  v.extra["dist_threshold"] = tol_dist;
  return finish(o, v, table);
}

int run_solve_coboundary(const Options& o, bool matrix_given, bool seed_given) {
  const KummerSystem sys = make_system_checked(resolve_matrix(o, matrix_given));
  const std::uint64_t seed = resolve_seed(o, seed_given);
  std::optional<MetricField> field;
  const Observable f = resolve_observable(o, sys, field);
  const TransferSolution sol = solve_transfer(f, sys, o.grid, o.reg);

  CoboundaryOptions copt;
  copt.seed = seed;
  copt.orbits = std::max(100, o.samples);
  copt.n_max = std::max(10, o.N);
  copt.slope_coboundary = o.slope_coboundary;
  copt.slope_not = o.slope_not;
  const CoboundaryVerdict cb = is_coboundary(f, sys, copt);

  Verdict v{"solve-coboundary", true, sol.residual_l2, 0.0, seed};
  v.extra["classification"] = to_string(cb.kind);
  v.extra["growth_slope"] = cb.slope;
  v.extra["mean"] = cb.mean;
  v.extra["grid"] = sol.grid;
  v.extra["regularization"] = sol.regularization;

  if (o.observable == "planted") {
    const TrigPoly4 psi({{{1, 0, 1, 0}, o.coeff}});
    double num = 0.0, den = 0.0;
    const int g = sol.grid;
    std::size_t idx = 0;
    for (int i0 = 0; i0 < g; ++i0)
      for (int i1 = 0; i1 < g; ++i1)
        for (int i2 = 0; i2 < g; ++i2)
          for (int i3 = 0; i3 < g; ++i3) {
            const double ref = psi({static_cast<double>(i0) / g, static_cast<double>(i1) / g,
                                    static_cast<double>(i2) / g, static_cast<double>(i3) / g});
            const double d = sol.alpha[idx++] - ref;
            num += d * d;
            den += ref * ref;
          }
    const double rel = std::sqrt(num / den);
    const double tol = o.tol > 0 ? o.tol : 1e-3;
    v.pass = rel <= tol && cb.kind == CoboundaryKind::Coboundary;
    v.statistic = rel;
    v.threshold = tol;
    v.extra["residual_l2"] = sol.residual_l2;
  }

  if (o.observable == "rho-u" && field) {
    // the companion solve for the stable side recovers the constant delta in
    // alpha_u + alpha_s = beta + delta as the mean discrepancy; its spread
    // measures how constant the recovered combination is
    const double half_h = 0.5 * sys.entropy();
    const Observable fs{[&field, half_h](const TorusPoint& p) {
                          return rho_and_beta(*field, p).rho_s + half_h;
                        },
                        std::nullopt, "rho_s+h/2"};
    const TransferSolution sol_s = solve_transfer(fs, sys, o.grid, o.reg);
    const int g = sol.grid;
    std::vector<double> disc(sol.alpha.size());
    std::size_t idx = 0;
    for (int i0 = 0; i0 < g; ++i0)
      for (int i1 = 0; i1 < g; ++i1)
        for (int i2 = 0; i2 < g; ++i2)
          for (int i3 = 0; i3 < g; ++i3) {
            const TorusPoint p{{static_cast<double>(i0) / g, static_cast<double>(i1) / g,
                                static_cast<double>(i2) / g, static_cast<double>(i3) / g}};
            disc[idx] = sol.alpha[idx] + sol_s.alpha[idx] - rho_and_beta(*field, p).beta;
            ++idx;
          }
    const MeanAndError me = mean_and_error(disc);
    double var = 0.0;
    for (double d : disc) var += (d - me.mean) * (d - me.mean);
    v.extra["delta"] = me.mean;
    v.extra["delta_spread"] = std::sqrt(var / static_cast<double>(disc.size()));
  }

  const auto profile = l2_birkhoff_profile(f, sys, seed, copt.orbits, copt.n_max);
  Artifact table{{"N", "l2_profile"}, {}};
  for (int n = 1; n <= copt.n_max; ++n)
    table.rows.push_back({static_cast<double>(n), profile[static_cast<std::size_t>(n)]});
  return finish(o, v, table);
}

int run_exp_moments(const Options& o, bool matrix_given, bool seed_given) {
  const KummerSystem sys = make_system_checked(resolve_matrix(o, matrix_given));
  const std::uint64_t seed = resolve_seed(o, seed_given);
  std::optional<MetricField> field;
  const Observable f = resolve_observable(o, sys, field);
  const auto table_rows = exp_moment_check(f, sys, o.gamma, o.N, seed, o.samples);

  Artifact table{{"N", "plain_moment", "log_plain", "plain_rel_se", "gamma_moment", "log_gamma",
                  "gamma_rel_se"},
                 {}};
  for (const auto& r : table_rows)
    table.rows.push_back({static_cast<double>(r.N), r.plain, r.log_plain, r.plain_rel_se,
                          r.gamma_abs, r.log_gamma_abs, r.gamma_abs_rel_se});

  Verdict v{"exp-moments", true, 0.0, 0.0, seed};
  if (o.observable == "planted") {
    // telescoping bound with sup |psi| = |coeff|
    const double bound = std::exp(2.0 * o.gamma * std::fabs(o.coeff));
    double worst = 0.0;
    for (const auto& r : table_rows) worst = std::max(worst, r.gamma_abs);
    v.pass = worst <= bound + 1e-12;
    v.statistic = worst;
    v.threshold = bound;
    v.extra["bound_kind"] = "telescoping";
  } else {
    // trend test: fitted slope of the log gamma-moment column vs N
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(table_rows.size());
    for (const auto& r : table_rows) {
      sx += r.N;
      sy += r.log_gamma_abs;
      sxx += static_cast<double>(r.N) * r.N;
      sxy += r.N * r.log_gamma_abs;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    v.pass = std::fabs(slope) * o.N < 0.5;  // total drift under half a log unit
    v.statistic = slope;
    v.threshold = 0.5 / o.N;
    v.extra["bound_kind"] = "trend";
  }
  return finish(o, v, table);
}

int run_tail_check(const Options& o, bool matrix_given, bool seed_given) {
  const KummerSystem sys = make_system_checked(resolve_matrix(o, matrix_given));
  const std::uint64_t seed = resolve_seed(o, seed_given);
  std::optional<MetricField> field;
  const Observable f = resolve_observable(o, sys, field);

  const auto moments = exp_moment_check(f, sys, o.gamma, o.N, seed, o.samples);
  double C = 0.0;
  for (const auto& r : moments) C = std::max(C, r.plain * (1.0 + 3.0 * r.plain_rel_se));

  std::vector<double> levels;
  for (double L = 0.5; L <= 6.0 + 1e-9; L += 0.5) levels.push_back(L);
  const auto rows = tail_bound_check(f, sys, levels, o.N, seed + 1, o.samples, C);

  Artifact table{{"L", "empirical", "bound", "binom_se", "pass"}, {}};
  bool all = true;
  double worst_excess = 0.0;
  for (const auto& r : rows) {
    all = all && r.pass;
    worst_excess = std::max(worst_excess, r.empirical - (r.bound + 3.0 * r.binom_se));
    table.rows.push_back({r.L, r.empirical, r.bound, r.binom_se, r.pass ? 1.0 : 0.0});
  }
  Verdict v{"tail-check", all, worst_excess, 0.0, seed};
  v.extra["chebyshev_constant"] = C;
  return finish(o, v, table);
}

int run_brody(const Options& o, bool seed_given) {
  const std::uint64_t seed = resolve_seed(o, seed_given);
  const HermitianForm I = HermitianForm::identity();
  std::vector<DiscMap> maps;
  if (!o.discmap_path.empty()) {
    maps.push_back(io::load_disc_map(o.discmap_path));
  } else {
    SplitMix64 rng(seed);
    for (int i = 0; i < o.count; ++i) {
      DiscMap m;
      m.c1.resize(11);
      m.c2.resize(11);
      for (int k = 0; k <= 10; ++k) {
        m.c1[static_cast<std::size_t>(k)] = {rng.next_double(-1, 1), rng.next_double(-1, 1)};
        m.c2[static_cast<std::size_t>(k)] = {rng.next_double(-1, 1), rng.next_double(-1, 1)};
      }
      maps.push_back(m);
    }
  }
  Artifact table{{"index", "y_re", "y_im", "scale", "achieved_radius", "deriv_at_origin",
                  "sup_half_disc"},
                 {}};
  double worst_deriv = 0.0, worst_sup = 0.0;
  bool pass = true;
  const int grid = o.grid > 16 ? o.grid : 256;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    try {
      const BrodyResult r = brody_reparametrize(maps[i], I, grid);
      worst_deriv = std::max(worst_deriv, std::fabs(r.deriv_at_origin - 1.0));
      worst_sup = std::max(worst_sup, r.sup_half_disc);
      table.rows.push_back({static_cast<double>(i), r.maximizer.real(), r.maximizer.imag(),
                            r.scale, r.achieved_radius, r.deriv_at_origin, r.sup_half_disc});
    } catch (const CertificationError& e) {
      std::cerr << "map " << i << ": " << e.what() << "\n";
      pass = false;
    }
  }
  pass = pass && worst_deriv <= 1e-6 && worst_sup <= 2.0 + 1e-6;
  Verdict v{"brody", pass, worst_sup, 2.0 + 1e-6, seed};
  v.extra["worst_deriv_deviation"] = worst_deriv;
  return finish(o, v, table);
}

int run_cutoff(const Options& o) {
  Artifact table{{"r", "sup_times_r2", "fd_rel_err"}, {}};
  double worst_fd = 0.0, worst_flat = 0.0;
  double base = 0.0;
  for (double r : {1.0, 10.0, 100.0}) {
    const CutoffProfile p{r};
    const CutoffBound b = cutoff_bound_check(p);
    if (r == 1.0) base = b.sup_times_r2;
    worst_flat = std::max(worst_flat, std::fabs(b.sup_times_r2 - base) / base);
    const double step = o.step * r;
    const cplx z{1.5 * r, 0.0};
    auto chi = [&](double x, double y) { return p.chi({x, y}); };
    const double lap = (chi(z.real() + step, 0.0) + chi(z.real() - step, 0.0) +
                        chi(z.real(), step) + chi(z.real(), -step) - 4.0 * chi(z.real(), 0.0)) /
                       (step * step);
    const double closed = 4.0 * cutoff_laplacian(p, z);
    const double rel = std::fabs(lap - closed) / std::max(1e-300, std::fabs(closed));
    worst_fd = std::max(worst_fd, rel);
    table.rows.push_back({r, b.sup_times_r2, rel});
  }
  const double tol = o.tol > 0 ? o.tol : 1e-5;
  const bool pass = worst_fd < tol && worst_flat <= 1e-9;
  Verdict v{"cutoff", pass, worst_fd, tol, 0};
  v.extra["scaling_flatness"] = worst_flat;
  return finish(o, v, table);
}

int run_curvature(const Options& o, bool seed_given) {
  const std::uint64_t seed = resolve_seed(o, seed_given);
  const double tol = o.tol > 0 ? o.tol : 1e-6;
  SplitMix64 rng(seed);
  auto random_positive = [&]() {
    std::vector<TrigPoly2::Mode> modes;
    modes.push_back({{0, 0}, rng.next_double(1.5, 3.0)});
    modes.push_back({{1, 0}, rng.next_double(-0.4, 0.4)});
    modes.push_back({{0, 1}, rng.next_double(-0.3, 0.3)});
    return TrigPoly2(modes);
  };
  Artifact table{{"sample", "abs_r2211", "abs_r1112", "abs_r1222", "fd_order"}, {}};
  double worst = 0.0, worst_order_dev = 0.0;
  const int trials = std::max(1, o.samples > 100 ? 20 : o.samples);
  for (int t = 0; t < trials; ++t) {
    const TrigPoly2 a = random_positive();
    const TrigPoly2 b = random_positive();
    const std::array<double, 4> x{rng.next_double(), rng.next_double(), rng.next_double(),
                                  rng.next_double()};
    const SplitCurvature r = split_metric_curvature(a, b, x, o.step);
    worst = std::max({worst, std::abs(r.r_2211), std::abs(r.r_1112), std::abs(r.r_1222)});

    // convergence order of the evaluator against the exact R_{1 1b 1 1b}
    const SplitMetric g{a, b};
    const double av = a({x[0], x[1]});
    const double lap = 0.25 * (a.second_partial({x[0], x[1]}, 0, 0) +
                               a.second_partial({x[0], x[1]}, 1, 1));
    const double ax = a.partial({x[0], x[1]}, 0), ay = a.partial({x[0], x[1]}, 1);
    const double exact = -lap + 0.25 * (ax * ax + ay * ay) / av;
    const double s = 4.0 * o.step;
    const double e1 = std::abs(curvature_component_fd(g, x, 1, 1, 1, 1, s) - exact);
    const double e2 = std::abs(curvature_component_fd(g, x, 1, 1, 1, 1, 0.5 * s) - exact);
    double order = 2.0;
    if (e1 > 1e-11 && e2 > 1e-12) order = std::log2(e1 / e2);
    worst_order_dev = std::max(worst_order_dev, std::fabs(order - 2.0));
    table.rows.push_back({static_cast<double>(t), std::abs(r.r_2211), std::abs(r.r_1112),
                          std::abs(r.r_1222), order});
  }
  const bool pass = worst < tol && worst_order_dev <= 0.3;
  Verdict v{"curvature", pass, worst, tol, seed};
  v.extra["worst_order_deviation"] = worst_order_dev;
  return finish(o, v, table);
}

int run_wehler_entropy(const Options& o) {
  const wehler::CohomologyEntropy ce = wehler::cohomology_entropy();
  const double expected = 9.0 + 4.0 * std::sqrt(5.0);
  const double err = std::fabs(ce.spectral_radius - expected);
  std::cout << "h = " << io::format_double(ce.entropy)
            << "  spectral radius = " << io::format_double(ce.spectral_radius)
            << "  char poly = l^3 - " << ce.char_poly[0] << " l^2 + (" << ce.char_poly[1]
            << ") l - (" << ce.char_poly[2] << ")\n";
  Artifact table{{"trace", "det", "spectral_radius", "entropy"},
                 {{static_cast<double>(ce.product.trace()), static_cast<double>(ce.product.det()),
                   ce.spectral_radius, ce.entropy}}};
  Verdict v{"wehler-entropy", err < 1e-9, err, 1e-9, 0};
  v.extra["entropy"] = ce.entropy;
  return finish(o, v, table);
}

wehler::WehlerSurface resolve_surface(const Options& o) {
  if (!o.surface_path.empty()) return io::load_surface(o.surface_path);
  return wehler::WehlerSurface::make_random();
}

int run_wehler_lyapunov(const Options& o, bool seed_given) {
  const std::uint64_t seed = resolve_seed(o, seed_given);
  const wehler::WehlerSurface s = resolve_surface(o);
  Artifact table{{"seed", "n", "estimate"}, {}};
  std::vector<double> finals;
  int restarts = 0;
  for (int k = 0; k < std::max(1, o.seeds); ++k) {
    const auto est = wehler::lyapunov_estimate(s, seed + static_cast<std::uint64_t>(k), o.N);
    finals.push_back(est.final_estimate);
    restarts += est.restarts;
    for (const auto& [n, val] : est.profile)
      table.rows.push_back({static_cast<double>(seed + static_cast<std::uint64_t>(k)),
                            static_cast<double>(n), val});
  }
  double mean = 0.0;
  for (double f : finals) mean += f;
  mean /= static_cast<double>(finals.size());
  double spread = 0.0;
  for (double f : finals) spread = std::max(spread, std::fabs(f - mean));
  const bool pass = mean > 0.0 && (finals.size() < 2 || spread <= 0.05 * mean);
  Verdict v{"wehler-lyapunov", pass, mean, 0.0, seed};
  v.extra["spread"] = spread;
  v.extra["restarts"] = restarts;
  return finish(o, v, table);
}

int run_wehler_volume(const Options& o, bool seed_given) {
  const std::uint64_t seed = resolve_seed(o, seed_given);
  const double tol = o.tol > 0 ? o.tol : 1e-6;
  const wehler::WehlerSurface s = resolve_surface(o);
  const wehler::VolumeReport rep = wehler::volume_invariance_check(s, seed, o.N);
  Artifact table{{"checked", "skipped", "max_abs_log_jacobian"},
                 {{static_cast<double>(rep.checked), static_cast<double>(rep.skipped),
                   rep.max_abs_log}}};
  Verdict v{"wehler-volume", rep.max_abs_log < tol, rep.max_abs_log, tol, seed};
  return finish(o, v, table);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kummerlab: verification lab for hyperbolic torus automorphisms, their metric "
               "cocycles, and a Wehler comparison system"};
  app.require_subcommand(1);

  Options o;
  std::vector<double> h1v, h2v, hv;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--matrix", o.matrix, "integer matrix a b c d");
    cmd->add_option("--config", o.config_path, "system spec file (key = value)");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--N", o.N, "iterate count / table length")->check(CLI::PositiveNumber);
    cmd->add_option("--grid", o.grid, "grid points per axis")->check(CLI::Range(2, 4096));
    cmd->add_option("--samples", o.samples, "Monte Carlo sample count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--gamma", o.gamma, "exponential moment parameter")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tol", o.tol, "override the default tolerance");
    cmd->add_option("--out", o.out, "artifact path (default <check>.<format>)");
    cmd->add_option("--format", o.format, "artifact format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* cmd_dist = app.add_subcommand("dist", "hyperbolic distance between two forms");
  cmd_dist->add_option("--h1", h1v, "form entries a b_re b_im d")->expected(4)->required();
  cmd_dist->add_option("--h2", h2v, "form entries a b_re b_im d")->expected(4)->required();
  add_common(cmd_dist);

  CLI::App* cmd_project = app.add_subcommand("project", "project a form onto the geodesic");
  cmd_project->add_option("--form", hv, "form entries a b_re b_im d")->expected(4)->required();
  add_common(cmd_project);

  CLI::App* cmd_vflat = app.add_subcommand("verify-flat", "lambda(x, N) = N h / 2 sweep");
  add_common(cmd_vflat);

  CLI::App* cmd_vjensen = app.add_subcommand("verify-jensen", "cohomological wedge integral");
  cmd_vjensen->add_option("--metric", o.metric_path, "potential file for the first field");
  cmd_vjensen->add_option("--metric2", o.metric2_path, "potential file for the second field");
  add_common(cmd_vjensen);

  CLI::App* cmd_vcocycle =
      app.add_subcommand("verify-cocycle", "coboundary and distance identities");
  cmd_vcocycle->add_option("--metric", o.metric_path, "potential file");
  add_common(cmd_vcocycle);

  CLI::App* cmd_solve = app.add_subcommand("solve-coboundary", "transfer least-squares solve");
  cmd_solve->add_option("--metric", o.metric_path, "potential file (rho observables)");
  cmd_solve->add_option("--observable", o.observable, "planted|cos1|constant|rho-u|rho-diff");
  cmd_solve->add_option("--coeff", o.coeff, "observable coefficient");
  cmd_solve->add_option("--reg", o.reg, "regularization");
  cmd_solve->add_option("--slope-coboundary", o.slope_coboundary,
                        "growth exponent below which the profile counts as bounded");
  cmd_solve->add_option("--slope-not", o.slope_not,
                        "growth exponent above which the observable is rejected");
  add_common(cmd_solve);

  CLI::App* cmd_expm = app.add_subcommand("exp-moments", "exponential moments of Birkhoff sums");
  cmd_expm->add_option("--metric", o.metric_path, "potential file (rho observables)");
  cmd_expm->add_option("--observable", o.observable, "planted|cos1|constant|rho-u|rho-diff");
  cmd_expm->add_option("--coeff", o.coeff, "observable coefficient");
  add_common(cmd_expm);

  CLI::App* cmd_tail = app.add_subcommand("tail-check", "Chebyshev-Markov tail table");
  cmd_tail->add_option("--metric", o.metric_path, "potential file (rho observables)");
  cmd_tail->add_option("--observable", o.observable, "planted|cos1|constant|rho-u|rho-diff");
  cmd_tail->add_option("--coeff", o.coeff, "observable coefficient");
  add_common(cmd_tail);

  CLI::App* cmd_brody = app.add_subcommand("brody", "disc-map reparametrization contracts");
  cmd_brody->add_option("--discmap", o.discmap_path, "disc map file");
  cmd_brody->add_option("--count", o.count, "number of seeded random maps");
  add_common(cmd_brody);

  CLI::App* cmd_cutoff = app.add_subcommand("cutoff", "radial cutoff laplacian checks");
  cmd_cutoff->add_option("--step", o.step, "finite difference step");
  add_common(cmd_cutoff);

  CLI::App* cmd_curv = app.add_subcommand("curvature", "split-metric curvature components");
  cmd_curv->add_option("--step", o.step, "finite difference step");
  add_common(cmd_curv);

  CLI::App* cmd_wh = app.add_subcommand("wehler-entropy", "cohomology action entropy");
  add_common(cmd_wh);

  CLI::App* cmd_wl = app.add_subcommand("wehler-lyapunov", "orbit Lyapunov estimate");
  cmd_wl->add_option("--surface", o.surface_path, "surface coefficient file");
  cmd_wl->add_option("--seeds", o.seeds, "number of independent seeds");
  add_common(cmd_wl);

  CLI::App* cmd_wv = app.add_subcommand("wehler-volume", "holomorphic 2-form invariance");
  cmd_wv->add_option("--surface", o.surface_path, "surface coefficient file");
  add_common(cmd_wv);

  // defaults that differ per subcommand
  cmd_solve->parse_complete_callback([&] {
    if (cmd_solve->count("--grid") == 0) o.grid = 32;
    if (cmd_solve->count("--samples") == 0) o.samples = 400;
    if (cmd_solve->count("--N") == 0) o.N = 150;
  });
  cmd_expm->parse_complete_callback([&] {
    if (cmd_expm->count("--N") == 0) o.N = 100;
    if (cmd_expm->count("--samples") == 0) o.samples = 400;
  });
  cmd_tail->parse_complete_callback([&] {
    if (cmd_tail->count("--N") == 0) o.N = 50;
    if (cmd_tail->count("--samples") == 0) o.samples = 2000;
  });
  cmd_wl->parse_complete_callback([&] {
    if (cmd_wl->count("--N") == 0) o.N = 100000;
  });
  cmd_wv->parse_complete_callback([&] {
    if (cmd_wv->count("--N") == 0) o.N = 1000;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (cmd_dist->parsed()) return run_dist(o, h1v, h2v);
    if (cmd_project->parsed()) return run_project(o, hv);
    if (cmd_vflat->parsed())
      return run_verify_flat(o, cmd_vflat->count("--matrix") > 0, cmd_vflat->count("--seed") > 0);
    if (cmd_vjensen->parsed())
      return run_verify_jensen(o, cmd_vjensen->count("--matrix") > 0,
                               cmd_vjensen->count("--seed") > 0);
    if (cmd_vcocycle->parsed())
      return run_verify_cocycle(o, cmd_vcocycle->count("--matrix") > 0,
                                cmd_vcocycle->count("--seed") > 0);
    if (cmd_solve->parsed())
      return run_solve_coboundary(o, cmd_solve->count("--matrix") > 0,
                                  cmd_solve->count("--seed") > 0);
    if (cmd_expm->parsed())
      return run_exp_moments(o, cmd_expm->count("--matrix") > 0, cmd_expm->count("--seed") > 0);
    if (cmd_tail->parsed())
      return run_tail_check(o, cmd_tail->count("--matrix") > 0, cmd_tail->count("--seed") > 0);
    if (cmd_brody->parsed()) return run_brody(o, cmd_brody->count("--seed") > 0);
    if (cmd_cutoff->parsed()) return run_cutoff(o);
    if (cmd_curv->parsed()) return run_curvature(o, cmd_curv->count("--seed") > 0);
    if (cmd_wh->parsed()) return run_wehler_entropy(o);
    if (cmd_wl->parsed()) return run_wehler_lyapunov(o, cmd_wl->count("--seed") > 0);
    if (cmd_wv->parsed()) return run_wehler_volume(o, cmd_wv->count("--seed") > 0);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "FAIL " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
