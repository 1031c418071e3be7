#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "historic/errors.hpp"
#include "historic/kahan.hpp"
#include "historic/systems.hpp"

// Averaging over group and semigroup structures: Folner box averages for the
// Z^2 toral action, spherical and Cesaro-spherical averages for the semigroup
// generated by z^4 and z^6, the double average over exponent rectangles, and
// pre-orbit witnesses with the exact remainder bound.
namespace historic::groupavg {

using systems::CirclePointRational;
using systems::TorusPointExact;

// Observable on the circle together with (an upper bound for) its sup norm.
struct CircleObservable {
  std::function<double(const CirclePointRational&)> f;
  double norm_inf = 1.0;

  double operator()(const CirclePointRational& p) const { return f(p); }
};

inline CircleObservable cos_observable() {
  return {[](const CirclePointRational& p) { return std::cos(2.0 * std::numbers::pi * p.value()); },
          1.0};
}

// cos^3(2 pi theta) = (3 cos(2 pi theta) + cos(6 pi theta)) / 4; a degree-3
// trigonometric polynomial with sup norm exactly 1.
inline CircleObservable cos_cubed_observable() {
  return {[](const CirclePointRational& p) {
            const double c = std::cos(2.0 * std::numbers::pi * p.value());
            return c * c * c;
          },
          1.0};
}

struct TorusObservable {
  std::function<double(const TorusPointExact&)> f;
  double norm_inf = 1.0;

  double operator()(const TorusPointExact& p) const { return f(p); }
};

// The square box F_n = [-n, n]^2 in Z^2.
struct FolnerBox {
  std::int64_t n = 0;

  std::uint64_t cardinality() const {
    const std::uint64_t side = 2 * static_cast<std::uint64_t>(n) + 1;
    return side * side;
  }
};

// (1 / |F_n|) sum over (m, k) in [-n, n]^2 of phi(g1^m g2^k (p)), exact group
// element enumeration, compensated mean. A constant orbit averages to the
// constant exactly.
inline double folner_average(const TorusPointExact& p, const TorusObservable& obs,
                             std::int64_t n) {
  std::vector<double> values;
  values.reserve(FolnerBox{n}.cardinality());
  for (std::int64_t m = -n; m <= n; ++m)
    for (std::int64_t k = -n; k <= n; ++k)
      values.push_back(obs(systems::z2_action_apply(m, k, p)));
  return shifted_mean(values);
}

// Binomial weight row w_j = C(k, j) / 2^k, advanced by the Pascal halving
// recurrence with renormalization when the drift exceeds 1e-12.
class SphericalWeights {
 public:
  SphericalWeights() : weights_{1.0} {}

  std::size_t k() const { return weights_.size() - 1; }
  const std::vector<double>& weights() const { return weights_; }

  void advance() {
    std::vector<double> next(weights_.size() + 1);
    next[0] = 0.5 * weights_[0];
    for (std::size_t j = 1; j < weights_.size(); ++j)
      next[j] = 0.5 * (weights_[j - 1] + weights_[j]);
    next[weights_.size()] = 0.5 * weights_.back();
    weights_ = std::move(next);
    const double total = kahan_sum(weights_);
    if (std::abs(total - 1.0) > 1e-12)
      for (double& w : weights_) w /= total;
  }

  void advance_to(std::size_t k_target) {
    while (k() < k_target) advance();
  }

 private:
  std::vector<double> weights_;
};

namespace detail {

// Residues of theta * 4^j * 6^(k-j) mod 1 for j = 0..k, as numerators over
// theta's denominator.
inline std::vector<std::uint64_t> sphere_residues(const CirclePointRational& theta,
                                                  std::size_t k) {
  const std::uint64_t d = theta.denominator;
  std::vector<std::uint64_t> pow4(k + 1), pow6(k + 1);
  pow4[0] = pow6[0] = 1 % d;
  for (std::size_t i = 1; i <= k; ++i) {
    pow4[i] = static_cast<std::uint64_t>(static_cast<unsigned __int128>(pow4[i - 1]) * 4 % d);
    pow6[i] = static_cast<std::uint64_t>(static_cast<unsigned __int128>(pow6[i - 1]) * 6 % d);
  }
  std::vector<std::uint64_t> out(k + 1);
  for (std::size_t j = 0; j <= k; ++j) {
    unsigned __int128 r = static_cast<unsigned __int128>(theta.numerator) * pow4[j] % d;
    out[j] = static_cast<std::uint64_t>(r * pow6[k - j] % d);
  }
  return out;
}

}  // namespace detail

// s_k = sum_j C(k, j)/2^k * phi(g1^j g2^(k-j) theta), powers exact on
// rationals.
inline double spherical_average(const CirclePointRational& theta, const CircleObservable& obs,
                                std::size_t k) {
  SphericalWeights row;
  row.advance_to(k);
  auto residues = detail::sphere_residues(theta, k);
  KahanSum acc;
  for (std::size_t j = 0; j <= k; ++j)
    acc.add(row.weights()[j] * obs(CirclePointRational(residues[j], theta.denominator)));
  return acc.value();
}

// Cesaro average (1/n) sum_{k<n} s_k, streamed over the weight-row recurrence.
inline double cesaro_spherical(const CirclePointRational& theta, const CircleObservable& obs,
                               std::size_t n) {
  if (n < 1) throw Error(ErrorCode::BAD_WINDOW, "n must be >= 1");
  SphericalWeights row;
  KahanSum outer;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) row.advance();
    auto residues = detail::sphere_residues(theta, k);
    KahanSum inner;
    for (std::size_t j = 0; j <= k; ++j)
      inner.add(row.weights()[j] * obs(CirclePointRational(residues[j], theta.denominator)));
    outer.add(inner.value());
  }
  return outer.value() / static_cast<double>(n);
}

namespace detail {

// phi(g1^k g2^l theta) for 0 <= k, l < n, as an n x n row-major table.
inline std::vector<double> psi_value_table(const CirclePointRational& theta,
                                           const CircleObservable& obs, std::size_t n) {
  const std::uint64_t d = theta.denominator;
  std::vector<std::uint64_t> pow4(n), pow6(n);
  pow4[0] = pow6[0] = 1 % d;
  for (std::size_t i = 1; i < n; ++i) {
    pow4[i] = static_cast<std::uint64_t>(static_cast<unsigned __int128>(pow4[i - 1]) * 4 % d);
    pow6[i] = static_cast<std::uint64_t>(static_cast<unsigned __int128>(pow6[i - 1]) * 6 % d);
  }
  std::vector<double> table(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t rk =
        static_cast<std::uint64_t>(static_cast<unsigned __int128>(theta.numerator) * pow4[k] % d);
    for (std::size_t l = 0; l < n; ++l) {
      const std::uint64_t r =
          static_cast<std::uint64_t>(static_cast<unsigned __int128>(rk) * pow6[l] % d);
      table[k * n + l] = obs(CirclePointRational(r, d));
    }
  }
  return table;
}

}  // namespace detail

// Psi_n = (1/n^2) sum_{k,l < n} phi(g1^k g2^l theta), exact orbit arithmetic,
// compensated summation over all n^2 terms.
inline double double_average_psi(const CirclePointRational& theta, const CircleObservable& obs,
                                 std::size_t n) {
  if (n < 1) throw Error(ErrorCode::BAD_WINDOW, "n must be >= 1");
  auto table = detail::psi_value_table(theta, obs, n);
  const double ref = table[0];
  KahanSum acc;
  for (double v : table) acc.add(v - ref);
  return ref + acc.value() / (static_cast<double>(n) * static_cast<double>(n));
}

// theta with g1^a g2^b (theta) = target, exactly.
struct PreOrbitWitness {
  CirclePointRational theta;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  CirclePointRational target;
};

// Solves 4^a 6^b theta = target (mod 1) over rationals: theta =
// (target + branch) / (4^a 6^b) with the branch index selecting among the
// 4^a 6^b pre-images; branch 0 is the smallest nonnegative solution.
inline PreOrbitWitness preorbit_construct(const CirclePointRational& target, std::uint64_t a,
                                          std::uint64_t b, std::uint64_t branch = 0) {
  std::uint64_t factor = 1;
  for (std::uint64_t i = 0; i < a; ++i) factor *= 4;
  for (std::uint64_t i = 0; i < b; ++i) factor *= 6;
  branch %= factor;
  PreOrbitWitness w;
  w.a = a;
  w.b = b;
  w.target = target;
  w.theta = CirclePointRational(target.numerator + branch * target.denominator,
                                target.denominator * factor);
  // forward check keeps the invariant honest
  CirclePointRational check = w.theta;
  for (std::uint64_t i = 0; i < a; ++i) check = systems::circle_mult(4, check);
  for (std::uint64_t i = 0; i < b; ++i) check = systems::circle_mult(6, check);
  if (!(check == target))
    throw Error(ErrorCode::BAD_INTERVAL, "pre-orbit construction failed forward check");
  return w;
}

struct PsiBoundResult {
  std::size_t n = 0;
  double lhs = 0.0;
  double bound = 0.0;
  bool holds = false;
};

// |Psi_n(theta) - ((n-a)(n-b)/n^2) phi(target)| against the remainder bound
// ((a+b)/n) * ||phi||_inf.
inline PsiBoundResult psi_error_bound_check(const PreOrbitWitness& w, const CircleObservable& obs,
                                            std::size_t n) {
  if (n <= std::max(w.a, w.b))
    throw Error(ErrorCode::HORIZON_TOO_SMALL, "need n > max(a, b)");
  const double nn = static_cast<double>(n);
  const double main_term = (nn - static_cast<double>(w.a)) * (nn - static_cast<double>(w.b)) /
                           (nn * nn) * obs(w.target);
  PsiBoundResult r;
  r.n = n;
  r.lhs = std::abs(double_average_psi(w.theta, obs, n) - main_term);
  r.bound = static_cast<double>(w.a + w.b) / nn * obs.norm_inf;
  r.holds = r.lhs <= r.bound + 1e-12;
  return r;
}

// Bound check for every n in [n_min, n_max], with Psi_n built incrementally
// by adding the border row and column of the exponent rectangle.
inline std::vector<PsiBoundResult> psi_error_bound_scan(const PreOrbitWitness& w,
                                                        const CircleObservable& obs,
                                                        std::size_t n_min, std::size_t n_max) {
  if (n_min <= std::max(w.a, w.b))
    throw Error(ErrorCode::HORIZON_TOO_SMALL, "need n > max(a, b)");
  if (n_min > n_max) throw Error(ErrorCode::BAD_WINDOW, "empty scan range");
  auto table = detail::psi_value_table(w.theta, obs, n_max);
  const double ref = table[0];
  const double phi_target = obs(w.target);
  std::vector<PsiBoundResult> out;
  out.reserve(n_max - n_min + 1);
  KahanSum acc;  // sum of (value - ref) over the n x n corner
  for (std::size_t n = 1; n <= n_max; ++n) {
    const std::size_t i = n - 1;
    for (std::size_t l = 0; l < n; ++l) acc.add(table[i * n_max + l] - ref);
    for (std::size_t k = 0; k + 1 < n; ++k) acc.add(table[k * n_max + i] - ref);
    if (n < n_min) continue;
    const double nn = static_cast<double>(n);
    const double psi = ref + acc.value() / (nn * nn);
    const double main_term = (nn - static_cast<double>(w.a)) * (nn - static_cast<double>(w.b)) /
                             (nn * nn) * phi_target;
    PsiBoundResult r;
    r.n = n;
    r.lhs = std::abs(psi - main_term);
    r.bound = static_cast<double>(w.a + w.b) / nn * obs.norm_inf;
    r.holds = r.lhs <= r.bound + 1e-12;
    out.push_back(r);
  }
  return out;
}

struct TemperedCheck {
  double C = 0.0;             // supplied (or certified minimal) constant
  std::size_t verified_up_to = 0;
  bool holds = false;
  double minimal_C = 0.0;     // smallest constant that works up to the horizon
};

// Literal lattice counting of union_{k<n} F_k^{-1} F_n against C * |F_n| for
// the symmetric boxes F_n = [-n, n]^2 (so F_k^{-1} = F_k and F_k F_n is the
// box [-(k+n), k+n]^2).
inline TemperedCheck tempered_check(std::size_t up_to, double C) {
  if (up_to < 2) throw Error(ErrorCode::BAD_WINDOW, "up_to must be >= 2");
  TemperedCheck result;
  result.C = C;
  result.verified_up_to = up_to;
  result.holds = true;
  for (std::size_t n = 1; n <= up_to; ++n) {
    const std::int64_t extent = static_cast<std::int64_t>(2 * n - 1);  // k = n-1 term
    const std::size_t side = static_cast<std::size_t>(2 * extent + 1);
    std::vector<std::uint8_t> grid(side * side, 0);
    for (std::size_t k = 0; k < n; ++k) {
      const std::int64_t r = static_cast<std::int64_t>(k + n);
      for (std::int64_t x = -r; x <= r; ++x)
        for (std::int64_t y = -r; y <= r; ++y)
          grid[static_cast<std::size_t>(x + extent) * side +
               static_cast<std::size_t>(y + extent)] = 1;
    }
    std::size_t count = 0;
    for (auto g : grid) count += g;
    const double ratio =
        static_cast<double>(count) / static_cast<double>(FolnerBox{static_cast<std::int64_t>(n)}.cardinality());
    result.minimal_C = std::max(result.minimal_C, ratio);
    if (ratio > C) result.holds = false;
  }
  return result;
}

}  // namespace historic::groupavg
