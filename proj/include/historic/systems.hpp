#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "historic/errors.hpp"

// Concrete phase-space systems: expanding circle maps on rational angles,
// the Kan skew product on the annulus, and the commuting pair of toral
// automorphisms with exact arithmetic on rational points.
namespace historic::systems {

// Angle p/q on the circle, kept reduced with 0 <= p < q.
struct CirclePointRational {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  CirclePointRational() = default;

  CirclePointRational(std::uint64_t num, std::uint64_t den) {
    if (den == 0) throw Error(ErrorCode::BAD_INTERVAL, "zero denominator");
    num %= den;
    const std::uint64_t g = std::gcd(num == 0 ? den : num, den);
    numerator = num / g;
    denominator = den / g;
    if (numerator == 0) denominator = 1;
  }

  bool operator==(const CirclePointRational&) const = default;

  double value() const {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }

  std::string str() const {
    return std::to_string(numerator) + "/" + std::to_string(denominator);
  }
};

// theta -> k*theta (mod 1), exactly.
inline CirclePointRational circle_mult(std::uint64_t k, const CirclePointRational& p) {
  const std::uint64_t q = p.denominator;
  unsigned __int128 n = static_cast<unsigned __int128>(k % q) * p.numerator;
  return CirclePointRational(static_cast<std::uint64_t>(n % q), q);
}

struct KanState {
  double x = 0.0;  // circle coordinate in [0, 1)
  double t = 0.0;  // fiber coordinate in [0, 1]
};

// T(x, t) = (3x mod 1, t + t(1-t)/32 * cos(2 pi x)). The boundary circles
// t = 0 and t = 1 are invariant; the interior stays interior because the
// perturbation magnitude is at most t(1-t)/32.
inline KanState kan_step(const KanState& s) {
  KanState out;
  out.x = std::fmod(3.0 * s.x, 1.0);
  if (out.x < 0.0) out.x += 1.0;
  out.t = s.t + s.t * (1.0 - s.t) / 32.0 * std::cos(2.0 * std::numbers::pi * s.x);
  return out;
}

enum class BasinLabel { B0, B1, UNDECIDED };

struct BasinClassification {
  BasinLabel label = BasinLabel::UNDECIDED;
  std::size_t iterations_used = 0;
};

// Iterates until the fiber coordinate crosses a threshold or the budget runs
// out. Threshold crossing is a stable classification because both boundary
// circles are attracting for the physical measures.
inline BasinClassification kan_basin_classify(KanState s, std::size_t max_iter, double low = 0.01,
                                              double high = 0.99) {
  if (!(0.0 < low && low < high && high < 1.0))
    throw Error(ErrorCode::BAD_INTERVAL, "need 0 < low < high < 1");
  BasinClassification c;
  for (std::size_t i = 0; i <= max_iter; ++i) {
    if (s.t < low) {
      c.label = BasinLabel::B0;
      c.iterations_used = i;
      return c;
    }
    if (s.t > high) {
      c.label = BasinLabel::B1;
      c.iterations_used = i;
      return c;
    }
    s = kan_step(s);
  }
  c.iterations_used = max_iter;
  return c;
}

// Rational point (a/q, b/q) on the 2-torus.
struct TorusPointExact {
  std::uint64_t q = 1;
  std::uint64_t a = 0;
  std::uint64_t b = 0;

  TorusPointExact() = default;
  TorusPointExact(std::uint64_t modulus, std::uint64_t ra, std::uint64_t rb)
      : q(modulus), a(ra % modulus), b(rb % modulus) {
    if (modulus == 0) throw Error(ErrorCode::BAD_INTERVAL, "zero modulus");
  }

  bool operator==(const TorusPointExact&) const = default;

  std::string str() const {
    return std::to_string(a) + "/" + std::to_string(q) + "," + std::to_string(b) + "/" +
           std::to_string(q);
  }
};

// 2x2 integer matrix with determinant +-1.
struct ToralMatrix {
  std::array<std::array<std::int64_t, 2>, 2> m{{{1, 0}, {0, 1}}};

  ToralMatrix() = default;
  ToralMatrix(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) : m{{{a, b}, {c, d}}} {
    const std::int64_t det = a * d - b * c;
    if (det != 1 && det != -1)
      throw Error(ErrorCode::BAD_INTERVAL, "toral matrix must have determinant +-1");
  }

  bool operator==(const ToralMatrix&) const = default;

  std::int64_t det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

  ToralMatrix inverse() const {
    const std::int64_t d = det();  // +-1
    return ToralMatrix(d * m[1][1], -d * m[0][1], -d * m[1][0], d * m[0][0]);
  }

  friend ToralMatrix operator*(const ToralMatrix& A, const ToralMatrix& B) {
    ToralMatrix out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        out.m[i][j] = A.m[i][0] * B.m[0][j] + A.m[i][1] * B.m[1][j];
    return out;
  }
};

// g1 and g2, with A1 = A2^2 (the maps commute).
inline ToralMatrix anosov_a1() { return ToralMatrix(2, 1, 1, 1); }
inline ToralMatrix anosov_a2() { return ToralMatrix(1, 1, 1, 0); }

// Exact M * (a, b)^T mod q.
inline TorusPointExact toral_apply(const ToralMatrix& M, const TorusPointExact& p) {
  const std::int64_t q = static_cast<std::int64_t>(p.q);
  auto reduce = [q](std::int64_t v) {
    v %= q;
    if (v < 0) v += q;
    return static_cast<std::uint64_t>(v);
  };
  const auto a = static_cast<std::int64_t>(p.a);
  const auto b = static_cast<std::int64_t>(p.b);
  TorusPointExact out;
  out.q = p.q;
  out.a = reduce((M.m[0][0] % q) * a + (M.m[0][1] % q) * b);
  out.b = reduce((M.m[1][0] % q) * a + (M.m[1][1] % q) * b);
  return out;
}

namespace detail {

// M^e mod q on residues, e >= 0, by repeated squaring on the 2x2 matrix of
// residues mod q.
struct MatMod {
  std::uint64_t q;
  std::array<std::array<std::uint64_t, 2>, 2> m;

  static MatMod from(const ToralMatrix& M, std::uint64_t q) {
    MatMod out{q, {}};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        std::int64_t v = M.m[i][j] % static_cast<std::int64_t>(q);
        if (v < 0) v += static_cast<std::int64_t>(q);
        out.m[i][j] = static_cast<std::uint64_t>(v);
      }
    return out;
  }

  static MatMod identity(std::uint64_t q) { return MatMod{q, {{{1, 0}, {0, 1}}}}; }

  MatMod mul(const MatMod& o) const {
    MatMod out{q, {}};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        unsigned __int128 s = 0;
        for (int k = 0; k < 2; ++k)
          s += static_cast<unsigned __int128>(m[i][k]) * o.m[k][j];
        out.m[i][j] = static_cast<std::uint64_t>(s % q);
      }
    return out;
  }

  MatMod pow(std::uint64_t e) const {
    MatMod base = *this;
    MatMod acc = identity(q);
    while (e > 0) {
      if (e & 1) acc = acc.mul(base);
      base = base.mul(base);
      e >>= 1;
    }
    return acc;
  }

  TorusPointExact apply(const TorusPointExact& p) const {
    TorusPointExact out;
    out.q = q;
    out.a = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(m[0][0]) * p.a + static_cast<unsigned __int128>(m[0][1]) * p.b) % q);
    out.b = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(m[1][0]) * p.a + static_cast<unsigned __int128>(m[1][1]) * p.b) % q);
    return out;
  }
};

}  // namespace detail

// M^e applied to p, exactly; negative e uses the exact inverse mod q.
inline TorusPointExact toral_power_apply(const ToralMatrix& M, std::int64_t e,
                                         const TorusPointExact& p) {
  const ToralMatrix base = e >= 0 ? M : M.inverse();
  const std::uint64_t k = e >= 0 ? static_cast<std::uint64_t>(e)
                                 : static_cast<std::uint64_t>(-(e + 1)) + 1;
  return detail::MatMod::from(base, p.q).pow(k).apply(p);
}

// The Z^2 action (m, n) . p = (g1^m o g2^n)(p), both powers by fast modular
// exponentiation. Since A1 = A2^2 this must equal g2^(2m+n)(p); that identity
// is checked elsewhere against the stepwise route.
inline TorusPointExact z2_action_apply(std::int64_t m, std::int64_t n, const TorusPointExact& p) {
  return toral_power_apply(anosov_a1(), m, toral_power_apply(anosov_a2(), n, p));
}

// Floating-point iteration of a toral automorphism is refused beyond 50
// steps: roundoff under uniform hyperbolicity destroys orbit fidelity long
// before that. Rational points go through the exact routines instead.
inline std::vector<std::array<double, 2>> toral_orbit_float(const ToralMatrix& M, double x,
                                                            double y, std::size_t steps) {
  if (steps > 50)
    throw Error(ErrorCode::HYPERBOLIC_FLOAT_HORIZON,
                "float orbits of hyperbolic toral maps are limited to 50 steps");
  std::vector<std::array<double, 2>> orbit;
  orbit.reserve(steps + 1);
  orbit.push_back({x, y});
  for (std::size_t i = 0; i < steps; ++i) {
    const double nx = std::fmod(static_cast<double>(M.m[0][0]) * x + static_cast<double>(M.m[0][1]) * y, 1.0);
    const double ny = std::fmod(static_cast<double>(M.m[1][0]) * x + static_cast<double>(M.m[1][1]) * y, 1.0);
    x = nx < 0.0 ? nx + 1.0 : nx;
    y = ny < 0.0 ? ny + 1.0 : ny;
    orbit.push_back({x, y});
  }
  return orbit;
}

}  // namespace historic::systems
