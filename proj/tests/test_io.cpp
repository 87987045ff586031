#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "helpers.hpp"
#include "kummerlab/io.hpp"

using namespace kummerlab;

TEST_CASE("system spec: parsing, overrides, and rejection of unknown keys") {
  std::istringstream ok("# comment\nmatrix = 2 1 1 1\nseed = 42\n");
  const io::SystemSpec spec = io::parse_system_spec(ok);
  CHECK(spec.matrix.m[0][0] == 2);
  CHECK(spec.matrix.m[1][1] == 1);
  CHECK(spec.seed == 42);

  std::istringstream unknown("matrix = 2 1 1 1\ncolour = blue\n");
  CHECK_THROWS_AS(io::parse_system_spec(unknown), ParseError);

  std::istringstream missing("seed = 3\n");
  CHECK_THROWS_AS(io::parse_system_spec(missing), ParseError);

  std::istringstream trailing("matrix = 2 1 1 1 9\n");
  CHECK_THROWS_AS(io::parse_system_spec(trailing), ParseError);

  std::istringstream garbage("matrix = a b c d\n");
  CHECK_THROWS_AS(io::parse_system_spec(garbage), ParseError);
}

TEST_CASE("potential files round trip exactly") {
  const TrigPoly4 phi({{{1, 0, 0, 0}, 0.002}, {{0, 1, 1, 0}, -0.0015}, {{2, 0, 0, 3}, 0.125}});
  std::ostringstream out;
  io::write_potential(out, phi);
  std::istringstream in(out.str());
  const TrigPoly4 back = io::parse_potential(in);
  REQUIRE(back.modes.size() == phi.modes.size());
  for (std::size_t i = 0; i < phi.modes.size(); ++i) {
    REQUIRE(back.modes[i].m == phi.modes[i].m);
    REQUIRE(back.modes[i].coeff == phi.modes[i].coeff);
  }

  std::istringstream bad("mode 1 0 0 x 0.5\n");
  CHECK_THROWS_AS(io::parse_potential(bad), ParseError);
  std::istringstream nohdr("1 0 0 0 0.5\n");
  CHECK_THROWS_AS(io::parse_potential(nohdr), ParseError);
}

TEST_CASE("disc map files round trip exactly") {
  DiscMap m;
  m.c1 = {cplx{0.125, -3.5}, cplx{0.0, 1.0}, cplx{2.0, 0.0}};
  m.c2 = {cplx{0.5, 0.5}, cplx{-1.0, 0.25}, cplx{0.0, 0.0}};
  std::ostringstream out;
  io::write_disc_map(out, m);
  std::istringstream in(out.str());
  const DiscMap back = io::parse_disc_map(in);
  REQUIRE(back.c1.size() == m.c1.size());
  for (std::size_t k = 0; k < m.c1.size(); ++k) {
    REQUIRE(back.c1[k] == m.c1[k]);
    REQUIRE(back.c2[k] == m.c2[k]);
  }

  std::istringstream empty("");
  CHECK_THROWS_AS(io::parse_disc_map(empty), ParseError);
  std::istringstream huge("deg 65\n");
  CHECK_THROWS_AS(io::parse_disc_map(huge), ParseError);
}

TEST_CASE("surface files round trip and reject missing coefficients") {
  const wehler::WehlerSurface s = wehler::WehlerSurface::make_random(7);
  std::ostringstream out;
  io::write_surface(out, s);
  std::istringstream in(out.str());
  const wehler::WehlerSurface back = io::parse_surface(in);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) REQUIRE(back.c[i][j][k] == s.c[i][j][k]);

  std::istringstream partial("0 0 0 1.5\n");
  CHECK_THROWS_AS(io::parse_surface(partial), ParseError);
  std::istringstream oob("0 0 3 1.5\n");
  CHECK_THROWS_AS(io::parse_surface(oob), ParseError);
}

TEST_CASE("csv writer emits a header and 17-digit reproducible doubles") {
  std::ostringstream out;
  io::CsvWriter csv(out, {"n", "value"});
  csv.row({1.0, 0.1});
  csv.row({2.0, 1.0 / 3.0});
  const std::string text = out.str();
  CHECK(text.rfind("n,value\n", 0) == 0);
  CHECK(text.find("0.33333333333333331") != std::string::npos);

  std::ostringstream out2;
  io::CsvWriter csv2(out2, {"n", "value"});
  csv2.row({1.0, 0.1});
  csv2.row({2.0, 1.0 / 3.0});
  CHECK(out2.str() == text);
}
