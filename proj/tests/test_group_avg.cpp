#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "historic/group_avg.hpp"
#include "historic/kahan.hpp"
#include "historic/rng.hpp"
#include "historic/systems.hpp"

using namespace historic;
using systems::CirclePointRational;
using systems::TorusPointExact;

namespace {

// Power by literal repeated application; oracle for the fast modular route.
TorusPointExact naive_power(const systems::ToralMatrix& M, std::int64_t e,
                            const TorusPointExact& p) {
  const systems::ToralMatrix step = e >= 0 ? M : M.inverse();
  TorusPointExact out = p;
  for (std::int64_t i = 0; i < std::abs(e); ++i) out = systems::toral_apply(step, out);
  return out;
}

groupavg::TorusObservable torus_wave() {
  return {[](const TorusPointExact& p) {
            const double x = static_cast<double>(p.a) / static_cast<double>(p.q);
            const double y = static_cast<double>(p.b) / static_cast<double>(p.q);
            return std::sin(2.0 * std::numbers::pi * x) + std::cos(2.0 * std::numbers::pi * y);
          },
          2.0};
}

// Enumerates every length-k word over {4, 6} and averages the observable over
// the word images with uniform weight 2^-k; oracle for the binomial-weight
// spherical average.
double spherical_oracle(const CirclePointRational& theta, const groupavg::CircleObservable& obs,
                        std::size_t k) {
  KahanSum acc;
  const std::size_t total = std::size_t{1} << k;
  for (std::size_t code = 0; code < total; ++code) {
    CirclePointRational p = theta;
    for (std::size_t i = 0; i < k; ++i)
      p = systems::circle_mult(((code >> i) & 1) ? 6 : 4, p);
    acc.add(obs(p));
  }
  return acc.value() / static_cast<double>(total);
}

}  // namespace

TEST_CASE("folner average at the common fixed point is exactly the observable value") {
  TorusPointExact origin(7, 0, 0);
  auto obs = torus_wave();
  const double v = obs(origin);
  for (std::int64_t n : {0, 1, 2, 5, 10})
    REQUIRE(groupavg::folner_average(origin, obs, n) == v);
}

TEST_CASE("folner average of a constant observable is exactly the constant") {
  groupavg::TorusObservable constant{[](const TorusPointExact&) { return 0.3251; }, 1.0};
  TorusPointExact p(97, 12, 55);
  REQUIRE(groupavg::folner_average(p, constant, 6) == 0.3251);
}

TEST_CASE("folner average matches literal box enumeration") {
  TorusPointExact p(5, 1, 0);
  auto obs = torus_wave();
  auto a1 = systems::anosov_a1();
  auto a2 = systems::anosov_a2();
  for (std::int64_t n : {0, 1, 2, 3}) {
    KahanSum acc;
    for (std::int64_t m = -n; m <= n; ++m)
      for (std::int64_t k = -n; k <= n; ++k)
        acc.add(obs(naive_power(a1, m, naive_power(a2, k, p))));
    const double expected = acc.value() / static_cast<double>(groupavg::FolnerBox{n}.cardinality());
    REQUIRE(std::abs(groupavg::folner_average(p, obs, n) - expected) < 1e-12);
  }
}

TEST_CASE("spherical weight rows reproduce exact binomial coefficients") {
  groupavg::SphericalWeights row;
  for (std::size_t k = 0; k <= 20; ++k) {
    REQUIRE(row.k() == k);
    // C(k, j) fits a uint64 and /2^k is an exact double operation here
    std::uint64_t c = 1;
    const double scale = std::pow(2.0, -static_cast<double>(k));
    for (std::size_t j = 0; j <= k; ++j) {
      REQUIRE(row.weights()[j] == static_cast<double>(c) * scale);
      c = c * (k - j) / (j + 1);
    }
    row.advance();
  }
}

TEST_CASE("spherical weight rows stay normalized over long advances") {
  groupavg::SphericalWeights row;
  row.advance_to(1000);
  REQUIRE(row.k() == 1000);
  REQUIRE(std::abs(kahan_sum(row.weights()) - 1.0) <= 1e-12);
}

TEST_CASE("spherical average matches the word-enumeration oracle") {
  auto obs = groupavg::cos_observable();
  CirclePointRational theta(1, 7);
  for (std::size_t k = 0; k <= 10; ++k)
    REQUIRE(std::abs(groupavg::spherical_average(theta, obs, k) - spherical_oracle(theta, obs, k)) <
            1e-12);
}

TEST_CASE("spherical average of a constant is the constant") {
  groupavg::CircleObservable constant{[](const CirclePointRational&) { return -1.5; }, 1.5};
  REQUIRE(std::abs(groupavg::spherical_average(CirclePointRational(3, 11), constant, 40) + 1.5) <
          1e-9);
}

TEST_CASE("cesaro average matches brute force and the per-sphere decomposition") {
  auto obs = groupavg::cos_cubed_observable();
  CirclePointRational theta(1, 4);
  const std::size_t n = 10;
  KahanSum acc;
  for (std::size_t k = 0; k < n; ++k) acc.add(spherical_oracle(theta, obs, k));
  const double brute = acc.value() / static_cast<double>(n);
  REQUIRE(std::abs(groupavg::cesaro_spherical(theta, obs, n) - brute) < 1e-12);

  KahanSum per_sphere;
  for (std::size_t k = 0; k < 25; ++k) per_sphere.add(groupavg::spherical_average(theta, obs, k));
  REQUIRE(std::abs(groupavg::cesaro_spherical(theta, obs, 25) - per_sphere.value() / 25.0) <
          1e-10);
  REQUIRE_THROWS_AS(groupavg::cesaro_spherical(theta, obs, 0), Error);
}

TEST_CASE("cos^3 observable values and norm") {
  auto obs = groupavg::cos_cubed_observable();
  REQUIRE(obs.norm_inf == 1.0);
  REQUIRE(obs(CirclePointRational(0, 1)) == 1.0);
  const double half = obs(CirclePointRational(1, 2));
  REQUIRE(std::abs(half + 1.0) < 1e-15);
  const double third = std::cos(2.0 * std::numbers::pi / 3.0);
  REQUIRE(std::abs(obs(CirclePointRational(1, 3)) - third * third * third) < 1e-15);
}

TEST_CASE("double average matches brute-force rectangle enumeration") {
  auto obs = groupavg::cos_observable();
  CirclePointRational theta(5, 13);
  for (std::size_t n : {1u, 2u, 8u}) {
    KahanSum acc;
    CirclePointRational row = theta;
    for (std::size_t k = 0; k < n; ++k) {
      CirclePointRational p = row;
      for (std::size_t l = 0; l < n; ++l) {
        acc.add(obs(p));
        p = systems::circle_mult(6, p);
      }
      row = systems::circle_mult(4, row);
    }
    const double brute = acc.value() / (static_cast<double>(n) * static_cast<double>(n));
    REQUIRE(std::abs(groupavg::double_average_psi(theta, obs, n) - brute) < 1e-12);
  }
}

TEST_CASE("pre-orbit construction solves the division exactly") {
  auto w1 = groupavg::preorbit_construct(CirclePointRational(0, 1), 1, 0, 1);
  REQUIRE(w1.theta == CirclePointRational(1, 4));
  auto w2 = groupavg::preorbit_construct(CirclePointRational(0, 1), 0, 1, 1);
  REQUIRE(w2.theta == CirclePointRational(1, 6));
  auto w3 = groupavg::preorbit_construct(CirclePointRational(1, 3), 2, 1, 5);
  REQUIRE(w3.theta == CirclePointRational(16, 288));  // reduces to 1/18
  REQUIRE(w3.theta == CirclePointRational(1, 18));
  // the branch index wraps modulo the number of pre-images
  auto w4 = groupavg::preorbit_construct(CirclePointRational(0, 1), 1, 0, 4);
  REQUIRE(w4.theta == CirclePointRational(0, 1));
}

TEST_CASE("remainder bound holds along the whole scan") {
  auto obs = groupavg::cos_cubed_observable();
  auto w = groupavg::preorbit_construct(CirclePointRational(0, 1), 1, 0, 1);  // theta = 1/4
  auto scan = groupavg::psi_error_bound_scan(w, obs, 2, 200);
  REQUIRE(scan.size() == 199);
  for (const auto& r : scan) REQUIRE(r.holds);
  // the incremental scan agrees with the standalone check
  for (std::size_t n : {2u, 17u, 200u}) {
    auto direct = groupavg::psi_error_bound_check(w, obs, n);
    REQUIRE(direct.holds);
    const auto& from_scan = scan[n - 2];
    REQUIRE(from_scan.n == n);
    REQUIRE(std::abs(from_scan.lhs - direct.lhs) < 1e-12);
    REQUIRE(from_scan.bound == direct.bound);
  }
}

TEST_CASE("remainder bound holds for a deep pre-orbit of the common fixed point") {
  // the bound's main-term argument needs a target fixed by both maps; 0 is
  // the only rational fixed by z^4 and z^6 simultaneously
  auto obs = groupavg::cos_observable();
  auto w = groupavg::preorbit_construct(CirclePointRational(0, 1), 3, 2, 7);
  auto scan = groupavg::psi_error_bound_scan(w, obs, 4, 300);
  for (const auto& r : scan) REQUIRE(r.holds);
  REQUIRE_THROWS_AS(groupavg::psi_error_bound_check(w, obs, 3), Error);
}

TEST_CASE("tempered condition for the square boxes") {
  auto good = groupavg::tempered_check(20, 4.0);
  REQUIRE(good.holds);
  // the worst ratio is |F_{2n-1} box| / |F_n| at the largest n checked
  const double expect = std::pow((4.0 * 20 - 1) / (2.0 * 20 + 1), 2);
  REQUIRE(std::abs(good.minimal_C - expect) < 1e-12);
  REQUIRE(good.minimal_C <= 4.0);
  auto bad = groupavg::tempered_check(20, 1.0);
  REQUIRE_FALSE(bad.holds);
  REQUIRE(bad.minimal_C == good.minimal_C);
  REQUIRE_THROWS_AS(groupavg::tempered_check(1, 4.0), Error);
}
