#pragma once

// File formats and artifact writers.
//
//   system spec   key=value lines:  matrix = a b c d   /  seed = n
//   potential     lines:  mode m1 m2 m3 m4 coeff
//   disc map      "deg n" then rows:  k re im re im
//   surface       27 lines:  i j k value
//
// '#' starts a comment; blank lines are ignored; unknown keys are rejected.
// CSV artifacts always carry a header row and print doubles with 17
// significant digits, so identical runs produce identical bytes.

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kummerlab/brody.hpp"
#include "kummerlab/common.hpp"
#include "kummerlab/torus.hpp"
#include "kummerlab/trigpoly.hpp"
#include "kummerlab/wehler.hpp"

namespace kummerlab::io {

inline std::string strip(const std::string& s) {
  const auto cut = s.find('#');
  std::string t = cut == std::string::npos ? s : s.substr(0, cut);
  const auto b = t.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = t.find_last_not_of(" \t\r\n");
  return t.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// System spec
// ---------------------------------------------------------------------------

struct SystemSpec {
  Mat2i matrix{{{2, 1}, {1, 1}}};
  std::uint64_t seed = 1;
};

inline SystemSpec parse_system_spec(std::istream& in) {
  SystemSpec spec;
  bool have_matrix = false;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = strip(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("system spec: expected key = value: " + t);
    const std::string key = strip(t.substr(0, eq));
    std::istringstream val(t.substr(eq + 1));
    if (key == "matrix") {
      Mat2i m;
      if (!(val >> m.m[0][0] >> m.m[0][1] >> m.m[1][0] >> m.m[1][1]))
        throw ParseError("system spec: matrix needs four integers");
      spec.matrix = m;
      have_matrix = true;
    } else if (key == "seed") {
      if (!(val >> spec.seed)) throw ParseError("system spec: seed needs an integer");
    } else {
      throw ParseError("system spec: unknown key '" + key + "'");
    }
    std::string extra;
    if (val >> extra) throw ParseError("system spec: trailing tokens after '" + key + "'");
  }
  if (!have_matrix) throw ParseError("system spec: missing 'matrix'");
  return spec;
}

inline SystemSpec load_system_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open system spec: " + path);
  return parse_system_spec(in);
}

// ---------------------------------------------------------------------------
// Metric potential
// ---------------------------------------------------------------------------

inline TrigPoly4 parse_potential(std::istream& in) {
  std::vector<TrigPoly4::Mode> modes;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = strip(line);
    if (t.empty()) continue;
    std::istringstream row(t);
    std::string tag;
    row >> tag;
    if (tag != "mode") throw ParseError("potential: expected 'mode m1 m2 m3 m4 coeff': " + t);
    TrigPoly4::Mode m;
    if (!(row >> m.m[0] >> m.m[1] >> m.m[2] >> m.m[3] >> m.coeff))
      throw ParseError("potential: malformed mode line: " + t);
    modes.push_back(m);
  }
  return TrigPoly4(std::move(modes));
}

inline TrigPoly4 load_potential(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open potential file: " + path);
  return parse_potential(in);
}

inline void write_potential(std::ostream& out, const TrigPoly4& phi) {
  for (const auto& m : phi.modes)
    out << "mode " << m.m[0] << ' ' << m.m[1] << ' ' << m.m[2] << ' ' << m.m[3] << ' '
        << format_double(m.coeff) << '\n';
}

// ---------------------------------------------------------------------------
// Disc maps
// ---------------------------------------------------------------------------

inline DiscMap parse_disc_map(std::istream& in) {
  std::string line;
  int deg = -1;
  DiscMap map;
  while (std::getline(in, line)) {
    const std::string t = strip(line);
    if (t.empty()) continue;
    std::istringstream row(t);
    if (deg < 0) {
      std::string tag;
      row >> tag;
      if (tag != "deg" || !(row >> deg) || deg < 0 || deg > DiscMap::kMaxDegree)
        throw ParseError("disc map: expected 'deg n' with 0 <= n <= 64");
      map.c1.assign(static_cast<std::size_t>(deg) + 1, cplx{0.0, 0.0});
      map.c2.assign(static_cast<std::size_t>(deg) + 1, cplx{0.0, 0.0});
      continue;
    }
    int k;
    double a, b, c, d;
    if (!(row >> k >> a >> b >> c >> d) || k < 0 || k > deg)
      throw ParseError("disc map: expected 'k re im re im': " + t);
    map.c1[static_cast<std::size_t>(k)] = {a, b};
    map.c2[static_cast<std::size_t>(k)] = {c, d};
  }
  if (deg < 0) throw ParseError("disc map: empty file");
  return map;
}

inline DiscMap load_disc_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open disc map: " + path);
  return parse_disc_map(in);
}

inline void write_disc_map(std::ostream& out, const DiscMap& map) {
  const std::size_t deg = std::max(map.c1.size(), map.c2.size());
  out << "deg " << (deg == 0 ? 0 : deg - 1) << '\n';
  for (std::size_t k = 0; k < deg; ++k) {
    const cplx a = k < map.c1.size() ? map.c1[k] : cplx{0.0, 0.0};
    const cplx b = k < map.c2.size() ? map.c2[k] : cplx{0.0, 0.0};
    out << k << ' ' << format_double(a.real()) << ' ' << format_double(a.imag()) << ' '
        << format_double(b.real()) << ' ' << format_double(b.imag()) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Wehler surfaces
// ---------------------------------------------------------------------------

inline wehler::WehlerSurface parse_surface(std::istream& in) {
  double coeff[3][3][3]{};
  bool seen[3][3][3]{};
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = strip(line);
    if (t.empty()) continue;
    std::istringstream row(t);
    int i, j, k;
    double v;
    if (!(row >> i >> j >> k >> v) || i < 0 || i > 2 || j < 0 || j > 2 || k < 0 || k > 2)
      throw ParseError("surface: expected 'i j k value' with indices in 0..2: " + t);
    coeff[i][j][k] = v;
    seen[i][j][k] = true;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        if (!seen[i][j][k])
          throw ParseError("surface: missing coefficient " + std::to_string(i) + " " +
                           std::to_string(j) + " " + std::to_string(k));
  return wehler::WehlerSurface::from_coefficients(coeff);
}

inline wehler::WehlerSurface load_surface(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open surface file: " + path);
  return parse_surface(in);
}

inline void write_surface(std::ostream& out, const wehler::WehlerSurface& s) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        out << i << ' ' << j << ' ' << k << ' ' << format_double(s.c[i][j][k]) << '\n';
}

// ---------------------------------------------------------------------------
// CSV artifacts
// ---------------------------------------------------------------------------

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(&out) {
    for (std::size_t i = 0; i < header.size(); ++i)
      *out_ << header[i] << (i + 1 < header.size() ? "," : "\n");
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      *out_ << format_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
  }

  void row_text(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      *out_ << values[i] << (i + 1 < values.size() ? "," : "\n");
  }

 private:
  std::ostream* out_;
};

}  // namespace kummerlab::io
