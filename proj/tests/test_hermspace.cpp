#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "kummerlab/hermspace.hpp"

using namespace kummerlab;
using testutil::random_unimodular;
using testutil::random_unimodular_map;

namespace {

// independent oracle: eigenvalues of h2 relative to h1 from the quadratic
// characteristic polynomial det(h2 - mu h1) = 0
double dist_by_charpoly(const HermitianForm& h1, const HermitianForm& h2) {
  // det(h2 - mu h1) = det(h1) mu^2 - s mu + det(h2) with
  // s = a1 d2 + a2 d1 - 2 Re(b1 conj(b2))
  const double A = h1.det();
  const double s = h1.a * h2.d + h2.a * h1.d - 2.0 * std::real(h1.b * std::conj(h2.b));
  const double C = h2.det();
  const double disc = std::sqrt(std::max(0.0, s * s - 4.0 * A * C));
  const double mu_max = (s + disc) / (2.0 * A);
  return std::log(mu_max);
}

}  // namespace

TEST_CASE("dist: pinned values") {
  const HermitianForm I = HermitianForm::identity();
  CHECK(dist(I, I) == 0.0);
  CHECK(dist(I, {4.0, {0.0, 0.0}, 0.25}) == Catch::Approx(std::log(4.0)).margin(1e-14));

  const HermitianForm h{2.0, {1.0, 0.0}, 1.0};
  const double expected = std::log((3.0 + std::sqrt(5.0)) / 2.0);
  CHECK(dist(I, h) == Catch::Approx(expected).margin(1e-13));
  CHECK(dist(I, h) == Catch::Approx(dist_by_charpoly(I, h)).margin(1e-13));
  CHECK(dist(I, h) == Catch::Approx(0.962424).margin(1e-6));
}

TEST_CASE("dist: rejects invalid forms") {
  const HermitianForm I = HermitianForm::identity();
  CHECK_THROWS_AS(dist(I, {2.0, {0.0, 0.0}, 1.0}), InvalidFormError);       // det 2
  CHECK_THROWS_AS(dist(I, {-1.0, {0.0, 0.0}, -1.0}), InvalidFormError);     // negative
  CHECK_THROWS_AS(dist(I, {1.0, {2.0, 0.0}, 1.0}), InvalidFormError);       // indefinite
  CHECK_THROWS_AS(wedge_ratio({1.0, {2.0, 0.0}, 1.0}, I), InvalidFormError);
}

TEST_CASE("wedge_ratio: normalization and diagonal family") {
  const HermitianForm I = HermitianForm::identity();
  CHECK(wedge_ratio(I, I) == 2.0);
  for (double t : {0.25, 1.0, 3.0}) {
    const HermitianForm d{std::exp(t), {0.0, 0.0}, std::exp(-t)};
    CHECK(wedge_ratio(I, d) == Catch::Approx(std::exp(t) + std::exp(-t)).margin(1e-12));
  }
}

TEST_CASE("wedge_ratio equals e^dist + e^-dist on random unimodular pairs") {
  SplitMix64 rng(42);
  for (int i = 0; i < 10000; ++i) {
    const HermitianForm h1 = random_unimodular(rng);
    const HermitianForm h2 = random_unimodular(rng);
    const double d = dist(h1, h2);
    const double w = wedge_ratio(h1, h2);
    REQUIRE(std::fabs(w - (std::exp(d) + std::exp(-d))) < 1e-10 * std::max(1.0, w));
  }
}

TEST_CASE("dist: symmetry, triangle inequality, charpoly cross-check") {
  SplitMix64 rng(7);
  for (int i = 0; i < 10000; ++i) {
    const HermitianForm h1 = random_unimodular(rng);
    const HermitianForm h2 = random_unimodular(rng);
    const HermitianForm h3 = random_unimodular(rng);
    const double d12 = dist(h1, h2), d21 = dist(h2, h1);
    REQUIRE(std::fabs(d12 - d21) < 1e-12 * std::max(1.0, d12));
    REQUIRE(dist(h1, h3) <= d12 + dist(h2, h3) + 1e-9);
    if (i % 100 == 0)
      REQUIRE(std::fabs(d12 - dist_by_charpoly(h1, h2)) < 1e-11 * std::max(1.0, d12));
  }
}

TEST_CASE("dist: equivariance under volume-preserving maps") {
  SplitMix64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const HermitianForm h1 = random_unimodular(rng);
    const HermitianForm h2 = random_unimodular(rng);
    const Mat2c L = random_unimodular_map(rng);
    const double d = dist(h1, h2);
    const double dl = dist(normalized(apply_linear(L, h1)), normalized(apply_linear(L, h2)));
    REQUIRE(std::fabs(d - dl) < 1e-10 * std::max(1.0, d));
  }
}

TEST_CASE("project_to_geodesic: closed form, idempotence, pinned example") {
  const auto g = GeodesicSplitting::make(
      UnimodularFrame::make({cplx{1.0, 0.0}, cplx{0.0, 0.0}}, {cplx{0.0, 0.0}, cplx{1.0, 0.0}}));

  const HermitianForm h{2.0, {1.0, 0.0}, 1.0};
  const HermitianForm p = project_to_geodesic(h, g);
  CHECK(p.a == Catch::Approx(std::sqrt(2.0)).margin(1e-15));
  CHECK(p.d == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-15));
  CHECK(p.b == cplx{0.0, 0.0});

  const HermitianForm I = HermitianForm::identity();
  const HermitianForm pI = project_to_geodesic(I, g);
  CHECK(pI.a == 1.0);
  CHECK(pI.d == 1.0);

  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const HermitianForm x = random_unimodular(rng);
    const HermitianForm px = project_to_geodesic(x, g);
    const HermitianForm ppx = project_to_geodesic(px, g);
    REQUIRE(std::fabs(px.a - ppx.a) < 1e-14 * px.a);
    REQUIRE(px.unimodular());
  }
}

TEST_CASE("project_to_geodesic: nearest point on the geodesic (search oracle)") {
  const auto g = GeodesicSplitting::make(
      UnimodularFrame::make({cplx{1.0, 0.0}, cplx{0.0, 0.0}}, {cplx{0.0, 0.0}, cplx{1.0, 0.0}}));
  SplitMix64 rng(19);
  for (int i = 0; i < 200; ++i) {
    const HermitianForm h = random_unimodular(rng);
    const HermitianForm p = project_to_geodesic(h, g);
    // the geodesic is t -> diag(e^t, e^-t); minimize dist(h, .) over t
    auto neg_dist = [&](double t) {
      return -dist(h, {std::exp(t), {0.0, 0.0}, std::exp(-t)});
    };
    const double t_best = golden_section_max(neg_dist, -6.0, 6.0, 200);
    REQUIRE(std::fabs(std::log(p.a) - t_best) < 1e-6);
  }
}

TEST_CASE("project_to_geodesic: distance-decreasing") {
  const auto g = GeodesicSplitting::make(
      UnimodularFrame::make({cplx{1.0, 0.0}, cplx{0.0, 0.0}}, {cplx{0.0, 0.0}, cplx{1.0, 0.0}}));
  SplitMix64 rng(23);
  for (int i = 0; i < 10000; ++i) {
    const HermitianForm h1 = random_unimodular(rng);
    const HermitianForm h2 = random_unimodular(rng);
    const double d = dist(h1, h2);
    const double dp = dist(project_to_geodesic(h1, g), project_to_geodesic(h2, g));
    REQUIRE(dp <= d + 1e-9);
  }
}

TEST_CASE("maximizing_line: diagonal case and non-uniqueness") {
  const HermitianForm I = HermitianForm::identity();
  const HermitianForm d{std::exp(2.0), {0.0, 0.0}, std::exp(-2.0)};
  const MaximizingLine ml = maximizing_line(I, d);
  REQUIRE(ml.unique);
  CHECK(std::abs(ml.direction.x) == Catch::Approx(1.0).margin(1e-12));
  CHECK(std::abs(ml.direction.y) < 1e-12);

  CHECK_FALSE(maximizing_line(I, I).unique);
}

TEST_CASE("maximizing_line: equality in the triangle inequality aligns the lines") {
  SplitMix64 rng(29);
  for (int i = 0; i < 500; ++i) {
    // three points on a common geodesic: E^dagger diag(e^t, e^-t) E
    const Mat2c E = random_unimodular_map(rng);
    auto on_geodesic = [&](double t) {
      return normalized(apply_linear(E, HermitianForm{std::exp(t), {0.0, 0.0}, std::exp(-t)}));
    };
    const double t1 = rng.next_double(-1.5, 0.0);
    const double t2 = rng.next_double(0.0, 1.0);
    const double t3 = t2 + rng.next_double(0.1, 1.5);
    const HermitianForm h1 = on_geodesic(t1), h2 = on_geodesic(t2), h3 = on_geodesic(t3);
    const double gap = dist(h1, h2) + dist(h2, h3) - dist(h1, h3);
    REQUIRE(std::fabs(gap) < 1e-9);
    const MaximizingLine l12 = maximizing_line(h1, h2);
    const MaximizingLine l23 = maximizing_line(h2, h3);
    REQUIRE(l12.unique);
    REQUIRE(l23.unique);
    REQUIRE(line_angle(l12.direction, l23.direction) < 1e-6);
  }
}

TEST_CASE("express_in_frame preserves determinant for unimodular frames") {
  SplitMix64 rng(31);
  for (int i = 0; i < 1000; ++i) {
    const HermitianForm h = random_unimodular(rng);
    const Mat2c E = random_unimodular_map(rng);
    const UnimodularFrame f =
        UnimodularFrame::make({E.m[0][0], E.m[1][0]}, {E.m[0][1], E.m[1][1]}, 1e-9);
    const HermitianForm hf = express_in_frame(h, f);
    REQUIRE(std::fabs(hf.det() - 1.0) < 1e-9);
  }
}

TEST_CASE("UnimodularFrame and GeodesicSplitting validation") {
  CHECK_THROWS_AS(UnimodularFrame::make({cplx{2.0, 0.0}, cplx{0.0, 0.0}},
                                        {cplx{0.0, 0.0}, cplx{1.0, 0.0}}),
                  InvalidFormError);
  UnimodularFrame f{{cplx{1.0, 0.0}, cplx{0.0, 0.0}}, {cplx{2.0, 0.0}, cplx{0.0, 0.0}}};
  CHECK_THROWS_AS(GeodesicSplitting::make(f), InvalidSplittingError);
}
