#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "kummerlab/torus.hpp"
#include "kummerlab/wehler.hpp"

using namespace kummerlab;
using namespace kummerlab::wehler;

namespace {

const WehlerSurface& surface() {
  static const WehlerSurface s = WehlerSurface::make_random();
  return s;
}

// power-iteration oracle for the largest singular value
double sigma_max_oracle(const Mat3c& J) {
  std::array<cplx, 3> v{cplx{1.0, 0.1}, cplx{0.5, -0.3}, cplx{-0.2, 0.7}};
  double s = 0.0;
  for (int it = 0; it < 2000; ++it) {
    // w = J^dagger J v
    std::array<cplx, 3> jv = J.apply(v);
    std::array<cplx, 3> w{};
    for (int i = 0; i < 3; ++i) {
      cplx acc{0.0, 0.0};
      for (int k = 0; k < 3; ++k) acc += std::conj(J.m[k][i]) * jv[k];
      w[i] = acc;
    }
    double n = 0.0;
    for (const cplx& z : w) n += std::norm(z);
    n = std::sqrt(n);
    if (n == 0.0) return 0.0;
    for (cplx& z : w) z /= n;
    s = n;
    v = w;
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("vieta involutions are involutive and preserve the surface") {
  SplitMix64 rng(21);
  const double scale = surface().coefficient_scale();
  for (int trial = 0; trial < 1000; ++trial) {
    const SurfacePoint p = sample_surface_point(surface(), rng);
    REQUIRE(std::abs(surface().F(p)) < 1e-9 * scale);
    for (int axis = 0; axis < 3; ++axis) {
      const SurfacePoint q = involution(surface(), p, axis);
      REQUIRE(std::abs(surface().F(q)) < 1e-9 * scale);
      const SurfacePoint back = involution(surface(), q, axis);
      // compare projectively
      for (int i = 0; i < 3; ++i) {
        const cplx cross = p.f[i].u * back.f[i].v - p.f[i].v * back.f[i].u;
        REQUIRE(std::abs(cross) < 1e-9);
      }
    }
    const SurfacePoint c = composed_map(surface(), p);
    REQUIRE(std::abs(surface().F(c)) < 1e-9 * scale);
  }
}

TEST_CASE("vieta involution: linear fiber swaps the finite root with infinity") {
  // kill every coefficient with an x^2 part: the x-fiber is B x + C
  double coeff[3][3][3]{};
  SplitMix64 rng(22);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      coeff[0][j][k] = 0.0;
      coeff[1][j][k] = rng.next_double(-1, 1);
      coeff[2][j][k] = rng.next_double(-1, 1);
    }
  const WehlerSurface s = WehlerSurface::from_coefficients(coeff);

  SurfacePoint p;
  p.f[1] = ProjPoint{cplx{0.3, 0.1}, cplx{1.0, 0.0}};
  p.f[2] = ProjPoint{cplx{-0.2, 0.4}, cplx{1.0, 0.0}};
  const auto q = s.fiber_quadratic(p, 0);
  REQUIRE(std::abs(q[0]) < 1e-15);
  // put the point on the finite root
  p.f[0] = ProjPoint{-q[2], q[1]}.normalized();
  REQUIRE(std::abs(s.F(p)) < 1e-12);

  const SurfacePoint at_inf = involution(s, p, 0);
  REQUIRE(at_inf.f[0].at_infinity(1e-10));
  REQUIRE(std::abs(s.F(at_inf)) < 1e-12);

  const SurfacePoint back = involution(s, at_inf, 0);
  REQUIRE_FALSE(back.f[0].at_infinity(1e-10));
  const cplx cross = p.f[0].u * back.f[0].v - p.f[0].v * back.f[0].u;
  REQUIRE(std::abs(cross) < 1e-12);
}

TEST_CASE("cohomology reflections: the stated characterization has a unique solution") {
  const Mat3i G = wehler_gram();
  // brute force: integer matrices fixing e2, e3 with first column in
  // [-3,3]^3, involutive and Gram-preserving
  int found = 0;
  Mat3i nontrivial;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -3; c <= 3; ++c) {
        Mat3i R = Mat3i::identity();
        R.m[0][0] = a;
        R.m[1][0] = b;
        R.m[2][0] = c;
        const Mat3i R2 = R * R;
        bool ok = true;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) ok = ok && R2.m[i][j] == (i == j ? 1 : 0);
        if (!ok) continue;
        // Gram preservation: R^T G R = G
        Mat3i RT;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) RT.m[i][j] = R.m[j][i];
        const Mat3i GG = RT * (G * R);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) ok = ok && GG.m[i][j] == G.m[i][j];
        if (!ok) continue;
        const bool is_identity = a == 1 && b == 0 && c == 0;
        if (!is_identity) {
          ++found;
          nontrivial = R;
        }
      }
  REQUIRE(found == 1);
  const Mat3i expected = cohomology_reflection(0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) REQUIRE(nontrivial.m[i][j] == expected.m[i][j]);
}

TEST_CASE("cohomology entropy: integer invariants and the spectral radius") {
  const CohomologyEntropy ce = cohomology_entropy();
  const Mat3i G = wehler_gram();
  for (const Mat3i* R : {&ce.rx, &ce.ry, &ce.rz}) {
    const Mat3i R2 = (*R) * (*R);
    Mat3i RT;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) RT.m[i][j] = R->m[j][i];
    const Mat3i GG = RT * (G * (*R));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        REQUIRE(R2.m[i][j] == (i == j ? 1 : 0));
        REQUIRE(GG.m[i][j] == G.m[i][j]);
      }
  }
  CHECK(ce.product.trace() == 17);
  CHECK(ce.product.det() == -1);
  CHECK(ce.char_poly == std::array<std::int64_t, 3>{17, -17, -1});
  const double expected_radius = 9.0 + 4.0 * std::sqrt(5.0);
  CHECK(std::fabs(ce.spectral_radius - expected_radius) < 1e-9);
  CHECK(ce.entropy == Catch::Approx(2.0 * std::log(2.0 + std::sqrt(5.0))).margin(1e-12));
  CHECK(ce.entropy == Catch::Approx(2.887270).margin(1e-6));
}

TEST_CASE("sigma_max agrees with power iteration") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    Mat3c J;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        J.m[i][j] = cplx{rng.next_double(-2, 2), rng.next_double(-2, 2)};
    const double a = sigma_max(J);
    const double b = sigma_max_oracle(J);
    REQUIRE(std::fabs(a - b) < 1e-8 * std::max(1.0, b));
  }
}

TEST_CASE("chart jacobian of the composed map matches finite differences") {
  SplitMix64 rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const SurfacePoint p = sample_surface_point(surface(), rng);
    SurfacePoint img;
    Mat3c J;
    {
      auto [p1, Jz] = involution_with_jacobian(surface(), p, 2);
      auto [p2, Jy] = involution_with_jacobian(surface(), p1, 1);
      auto [p3, Jx] = involution_with_jacobian(surface(), p2, 0);
      img = p3;
      J = Jx * (Jy * Jz);
    }
    const double h = 1e-6;
    for (int j = 0; j < 3; ++j) {
      for (const cplx dir : {cplx{h, 0.0}, cplx{0.0, h}}) {
        SurfacePoint pp = p, pm = p;
        auto nudge = [&](SurfacePoint& q, cplx eps) {
          if (q.f[j].v == cplx{1.0, 0.0})
            q.f[j].u += eps;
          else
            q.f[j].v += eps;
        };
        nudge(pp, dir);
        nudge(pm, -dir);
        const SurfacePoint ip = composed_map(surface(), pp);
        const SurfacePoint im = composed_map(surface(), pm);
        for (int i = 0; i < 3; ++i) {
          // all three evaluations must land in the same output chart for the
          // difference to be meaningful
          const bool chart_p = ip.f[i].v == cplx{1.0, 0.0};
          const bool chart_m = im.f[i].v == cplx{1.0, 0.0};
          const bool chart_0 = img.f[i].v == cplx{1.0, 0.0};
          if (chart_p != chart_m || chart_p != chart_0) continue;
          const cplx fd = (chart_value(ip.f[i]) - chart_value(im.f[i])) / (2.0 * dir);
          const cplx exact = J.m[i][j];
          REQUIRE(std::abs(fd - exact) < 1e-4 * std::max(1.0, std::abs(exact)));
        }
      }
    }
  }
}

TEST_CASE("volume invariance of the residue form") {
  for (int axis : {0, 1, 2}) {
    const VolumeReport rep = volume_invariance_check(surface(), 31, 1000, axis);
    REQUIRE(rep.checked > 900);
    REQUIRE(rep.max_abs_log < 1e-6);
  }
  const VolumeReport composed = volume_invariance_check(surface(), 37, 1000);
  REQUIRE(composed.checked > 900);
  REQUIRE(composed.max_abs_log < 1e-6);
}

TEST_CASE("lyapunov estimate: positive, seed-stable, and subadditive") {
  std::vector<double> estimates;
  for (std::uint64_t seed : {101ull, 202ull, 303ull}) {
    const LyapunovEstimate est = lyapunov_estimate(surface(), seed, 20000);
    REQUIRE(est.final_estimate > 0.0);
    estimates.push_back(est.final_estimate);
  }
  const double mean = (estimates[0] + estimates[1] + estimates[2]) / 3.0;
  // short orbits here; the acceptance suite holds the 5% contract at N = 1e5
  for (double e : estimates) REQUIRE(std::fabs(e - mean) < 0.10 * mean);

  const auto means = window_profile(surface(), 41, 4000, 10);
  for (auto [k, l] : {std::pair{1, 1}, {2, 3}, {5, 5}, {4, 6}}) {
    REQUIRE(means[static_cast<std::size_t>(k + l)] <=
            means[static_cast<std::size_t>(k)] + means[static_cast<std::size_t>(l)] + 1e-9);
  }
}

TEST_CASE("kummer control: the same product-norm estimator returns exactly h/2") {
  // constant cat-map jacobian embedded in the 3x3 machinery
  const KummerSystem sys = KummerSystem::make(testutil::cat_matrix());
  Mat3c J = Mat3c::identity();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) J.m[i][j] = static_cast<double>(sys.matrix().m[i][j]);
  Mat3c P = Mat3c::identity();
  double log_scale = 0.0;
  const int N = 2000;
  for (int n = 0; n < N; ++n) {
    P = J * P;
    const double sc = P.max_abs();
    if (sc > 1e30) {
      for (auto& row : P.m)
        for (auto& z : row) z /= sc;
      log_scale += std::log(sc);
    }
  }
  const double est = (std::log(sigma_max(P)) + log_scale) / N;
  REQUIRE(est == Catch::Approx(0.5 * sys.entropy()).epsilon(1e-10));
}

TEST_CASE("the reversed composition inverts the composed map") {
  SplitMix64 rng(27);
  for (int trial = 0; trial < 100; ++trial) {
    const SurfacePoint p = sample_surface_point(surface(), rng);
    const SurfacePoint q = composed_map(surface(), p);  // sigma_x o sigma_y o sigma_z
    const SurfacePoint back =
        involution(surface(), involution(surface(), involution(surface(), q, 0), 1), 2);
    for (int i = 0; i < 3; ++i) {
      const cplx cross = p.f[i].u * back.f[i].v - p.f[i].v * back.f[i].u;
      REQUIRE(std::abs(cross) < 1e-9);
    }
  }
}

TEST_CASE("the default seeded surface is reproducible") {
  const WehlerSurface a = WehlerSurface::make_random();
  const WehlerSurface b = WehlerSurface::make_random(WehlerSurface::kDefaultSeed);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) REQUIRE(a.c[i][j][k] == b.c[i][j][k]);
}
