#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kummerlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidFormError : Error {
  using Error::Error;
};
struct InvalidSplittingError : Error {
  using Error::Error;
};
struct EvaluationError : Error {
  using Error::Error;
};
struct AliasingError : Error {
  using Error::Error;
};
struct DegenerateMapError : Error {
  using Error::Error;
};
struct CertificationError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Seeded random numbers.  SplitMix64 is the fixed generator for every sampled
// quantity in the library: it is a documented public-domain algorithm with a
// 64-bit state, so streams are bit-reproducible across platforms for a given
// seed.
// ---------------------------------------------------------------------------

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0,1), 53 mantissa bits
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [lo,hi)
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // standard normal via Box-Muller (deterministic two-draw form)
  double next_gaussian() {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 < 0x1.0p-60) u1 = 0x1.0p-60;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  cplx next_complex_gaussian() {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 < 0x1.0p-60) u1 = 0x1.0p-60;
    const double r = std::sqrt(-std::log(u1));
    return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
  }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Deterministic accumulation.  Sums are reduced over a fixed pairwise tree so
// the result does not depend on how work would be chunked.
// ---------------------------------------------------------------------------

inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double pairwise_mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return pairwise_sum(v) / static_cast<double>(v.size());
}

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

inline MeanAndError mean_and_error(std::span<const double> v) {
  MeanAndError out;
  out.count = v.size();
  if (v.empty()) return out;
  out.mean = pairwise_mean(v);
  if (v.size() < 2) return out;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - out.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(v.size() - 1);
  out.std_error = std::sqrt(var / static_cast<double>(v.size()));
  return out;
}

// ---------------------------------------------------------------------------
// Small complex linear algebra on C^2 (tangent spaces are 2-dimensional
// everywhere in this library).
// ---------------------------------------------------------------------------

struct C2 {
  cplx x{0.0, 0.0};
  cplx y{0.0, 0.0};
};

inline C2 operator+(const C2& u, const C2& v) { return {u.x + v.x, u.y + v.y}; }
inline C2 operator*(cplx s, const C2& v) { return {s * v.x, s * v.y}; }

// complex determinant det[u v]
inline cplx det2(const C2& u, const C2& v) { return u.x * v.y - u.y * v.x; }

inline double norm_sq(const C2& v) { return std::norm(v.x) + std::norm(v.y); }

// 2x2 complex matrix, column-major action m * v
struct Mat2c {
  cplx m[2][2]{{cplx{0, 0}, cplx{0, 0}}, {cplx{0, 0}, cplx{0, 0}}};

  static Mat2c identity() {
    Mat2c r;
    r.m[0][0] = 1.0;
    r.m[1][1] = 1.0;
    return r;
  }

  C2 apply(const C2& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y};
  }

  cplx det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
};

inline Mat2c operator*(const Mat2c& a, const Mat2c& b) {
  Mat2c r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
  return r;
}

// ---------------------------------------------------------------------------
// 1-D golden-section maximization of a unimodal (or locally unimodal) function
// on [lo, hi].  Deterministic; returns the abscissa of the maximum.
// ---------------------------------------------------------------------------

template <class F>
double golden_section_max(F&& f, double lo, double hi, int iters = 80) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && (b - a) > 0.0; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace kummerlab
