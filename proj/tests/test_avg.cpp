#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "historic/avg.hpp"
#include "historic/rng.hpp"
#include "historic/systems.hpp"

using namespace historic;

namespace {

// Independent generator for the doubling-block word 0^1 1^2 0^4 1^8 ...,
// used as the oracle against the symbolic module's construction.
std::vector<double> doubling_block_values(std::size_t horizon) {
  std::vector<double> vals;
  vals.reserve(horizon);
  std::uint64_t len = 1;
  int sym = 0;
  while (vals.size() < horizon) {
    for (std::uint64_t i = 0; i < len && vals.size() < horizon; ++i)
      vals.push_back(static_cast<double>(sym));
    len *= 2;
    sym = 1 - sym;
  }
  return vals;
}

// Brute-force window extremes, the oracle for lambda_probe.
std::pair<double, double> window_extremes(const std::vector<double>& xs, std::size_t from1) {
  double mn = xs[from1 - 1], mx = xs[from1 - 1];
  for (std::size_t i = from1 - 1; i < xs.size(); ++i) {
    mn = std::min(mn, xs[i]);
    mx = std::max(mx, xs[i]);
  }
  return {mn, mx};
}

}  // namespace

TEST_CASE("partial averages of a constant sequence") {
  // dyadic constant: sums and divisions are exact
  std::vector<double> dyadic(5, 0.75);
  for (double a : avg::birkhoff_partial_averages(dyadic, 5)) REQUIRE(a == 0.75);
  // non-dyadic constant: one rounding each in the sum and the division
  std::vector<double> vals(5, 0.7);
  auto avgs = avg::birkhoff_partial_averages(vals, 5);
  REQUIRE(avgs.size() == 5);
  for (double a : avgs) REQUIRE(std::abs(a - 0.7) < 1e-15);
}

TEST_CASE("partial averages of the all-zeros point vanish") {
  std::vector<double> vals(100, 0.0);
  for (double a : avg::birkhoff_partial_averages(vals, 100)) REQUIRE(a == 0.0);
}

TEST_CASE("partial averages reject empty input and bad horizons") {
  std::vector<double> empty;
  REQUIRE_THROWS_AS(avg::birkhoff_partial_averages(empty, 1), Error);
  std::vector<double> one{1.0};
  REQUIRE_THROWS_AS(avg::birkhoff_partial_averages(one, 2), Error);
}

TEST_CASE("doubling-block averages oscillate between 1/3 and 2/3") {
  const std::size_t H = 1u << 20;
  auto vals = doubling_block_values(H);
  auto avgs = avg::birkhoff_partial_averages(vals, H);
  auto r = avg::oscillation_report(avgs, 0.5, 0.02);
  REQUIRE(std::abs(r.liminf_est - 1.0 / 3.0) < 0.01);
  REQUIRE(std::abs(r.limsup_est - 2.0 / 3.0) < 0.01);
  REQUIRE(std::abs(r.gap - 1.0 / 3.0) < 0.02);
}

TEST_CASE("telescoping identity on random sequences") {
  SplitMix64 rng(42);
  std::vector<double> vals(5000);
  for (auto& v : vals) v = 2.0 * rng.next_double() - 1.0;
  auto avgs = avg::birkhoff_partial_averages(vals, vals.size());
  for (std::size_t n = 2; n <= vals.size(); ++n) {
    const double lhs = static_cast<double>(n) * avgs[n - 1] -
                       static_cast<double>(n - 1) * avgs[n - 2];
    REQUIRE(std::abs(lhs - vals[n - 1]) < 1e-9);
  }
  // bound preservation
  for (double a : avgs) REQUIRE(std::abs(a) <= 1.0 + 1e-15);
}

TEST_CASE("oscillation report on the alternating sequence") {
  std::vector<double> avgs;
  for (int n = 1; n <= 100; ++n) avgs.push_back(n % 2 == 0 ? 1.0 : -1.0);
  auto r = avg::oscillation_report(avgs, 0.5, 0.1);
  REQUIRE(r.gap == 2.0);
  REQUIRE(r.clusters.size() == 2);
  REQUIRE(r.clusters[0].center == -1.0);
  REQUIRE(r.clusters[1].center == 1.0);
  REQUIRE(r.clusters[0].weight + r.clusters[1].weight == 50);
}

TEST_CASE("oscillation report on a convergent sequence") {
  std::vector<double> avgs;
  for (int n = 1; n <= 1000; ++n) avgs.push_back(1.0 / n);
  auto r = avg::oscillation_report(avgs, 0.1, 0.1);
  REQUIRE(r.clusters.size() == 1);
  REQUIRE(r.clusters[0].center < 2e-3);
  REQUIRE(r.gap < 2e-4);
}

TEST_CASE("oscillation report gap equals tail max minus tail min exactly") {
  SplitMix64 rng(7);
  std::vector<double> avgs(997);
  for (auto& a : avgs) a = rng.next_double();
  auto r = avg::oscillation_report(avgs, 0.3, 0.05);
  const std::size_t window = static_cast<std::size_t>(std::ceil(0.3 * 997));
  double mn = 2.0, mx = -1.0;
  for (std::size_t i = avgs.size() - window; i < avgs.size(); ++i) {
    mn = std::min(mn, avgs[i]);
    mx = std::max(mx, avgs[i]);
  }
  REQUIRE(r.liminf_est == mn);
  REQUIRE(r.limsup_est == mx);
  REQUIRE(r.gap == mx - mn);
  std::size_t total_weight = 0;
  for (const auto& c : r.clusters) total_weight += c.weight;
  REQUIRE(total_weight == window);
}

TEST_CASE("oscillation report validates its window") {
  std::vector<double> avgs{1.0};
  std::vector<double> no_avgs;
  REQUIRE_THROWS_AS(avg::oscillation_report(no_avgs, 0.5, 0.1), Error);
  REQUIRE_THROWS_AS(avg::oscillation_report(avgs, 0.0, 0.1), Error);
  REQUIRE_THROWS_AS(avg::oscillation_report(avgs, 0.5, 0.0), Error);
}

TEST_CASE("lambda probe on a constant sequence") {
  std::vector<double> avgs(50, 0.4);
  auto p = avg::lambda_probe(avgs, 1, 0.5);
  REQUIRE_FALSE(p.violated);
  REQUIRE_FALSE(p.violation_pair.has_value());
}

TEST_CASE("lambda probe on the alternating sequence reports pair (3,4)") {
  std::vector<double> avgs;
  for (int n = 1; n <= 10; ++n) avgs.push_back(n % 2 == 0 ? 1.0 : -1.0);
  auto p = avg::lambda_probe(avgs, 3, 1.0);
  REQUIRE(p.violated);
  REQUIRE(p.violation_pair->first == 3);
  REQUIRE(p.violation_pair->second == 4);
}

TEST_CASE("lambda probe agrees with brute-force window extremes") {
  const std::size_t H = 1u << 16;
  auto avgs = avg::birkhoff_partial_averages(doubling_block_values(H), H);
  auto p = avg::lambda_probe(avgs, 100, 0.1);
  auto [mn, mx] = window_extremes(avgs, 100);
  REQUIRE(p.violated == (mx - mn > 0.1));
  REQUIRE(p.violated);
  const auto [n, m] = *p.violation_pair;
  REQUIRE(n >= 100);
  REQUIRE(m > n);
  REQUIRE(std::abs(avgs[n - 1] - avgs[m - 1]) > 0.1);
}

TEST_CASE("lambda probe witness is the lexicographically first pair") {
  SplitMix64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> avgs(40);
    for (auto& a : avgs) a = rng.next_double();
    const double eta = 0.2 + 0.7 * rng.next_double();
    const std::size_t N = 1 + rng.next_below(20);
    auto p = avg::lambda_probe(avgs, N, eta);
    // brute-force lexicographic scan
    bool found = false;
    std::pair<std::size_t, std::size_t> first_pair;
    for (std::size_t n = N; n <= avgs.size() && !found; ++n)
      for (std::size_t m = n + 1; m <= avgs.size(); ++m)
        if (std::abs(avgs[n - 1] - avgs[m - 1]) > eta) {
          first_pair = {n, m};
          found = true;
          break;
        }
    REQUIRE(p.violated == found);
    if (found) REQUIRE(*p.violation_pair == first_pair);
  }
}

TEST_CASE("lambda probe is monotone in eta") {
  const std::size_t H = 4096;
  auto avgs = avg::birkhoff_partial_averages(doubling_block_values(H), H);
  for (double eta2 : {0.05, 0.1, 0.2, 0.3}) {
    auto p2 = avg::lambda_probe(avgs, 10, eta2);
    if (p2.violated)
      for (double eta1 : {eta2 / 2, eta2 / 4})
        REQUIRE(avg::lambda_probe(avgs, 10, eta1).violated);
  }
}

TEST_CASE("lambda probe rejects out-of-range N") {
  std::vector<double> avgs(10, 0.0);
  REQUIRE_THROWS_AS(avg::lambda_probe(avgs, 11, 0.1), Error);
  REQUIRE_THROWS_AS(avg::lambda_probe(avgs, 0, 0.1), Error);
}

TEST_CASE("level-set classification") {
  std::vector<double> conv(1000, 0.4);
  auto rconv = avg::oscillation_report(conv, 0.25, 0.01);
  auto c1 = avg::classify_level_set(rconv, 0.4, 0.4, 0.01);
  REQUIRE(c1.membership == avg::LevelSetMembership::IN_LEVEL_SET);
  auto c2 = avg::classify_level_set(rconv, -0.6, 1.4, 0.01);
  REQUIRE(c2.membership == avg::LevelSetMembership::OUTSIDE);
  REQUIRE_THROWS_AS(avg::classify_level_set(rconv, 1.0, 0.0, 0.1), Error);

  const std::size_t H = 1u << 20;
  auto avgs = avg::birkhoff_partial_averages(doubling_block_values(H), H);
  auto rblock = avg::oscillation_report(avgs, 0.5, 0.02);
  auto c3 = avg::classify_level_set(rblock, 1.0 / 3.0, 2.0 / 3.0, 0.02);
  REQUIRE(c3.membership == avg::LevelSetMembership::IN_LEVEL_SET);
}

TEST_CASE("IN_LEVEL_SET implies the hat condition on random reports") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    avg::OscillationReport r;
    r.liminf_est = rng.next_double();
    r.limsup_est = r.liminf_est + rng.next_double();
    r.gap = r.limsup_est - r.liminf_est;
    const double alpha = rng.next_double();
    const double beta = alpha + rng.next_double();
    const double tol = 0.01 + rng.next_double();
    auto c = avg::classify_level_set(r, alpha, beta, tol);
    if (c.membership == avg::LevelSetMembership::IN_LEVEL_SET) {
      REQUIRE(r.liminf_est <= alpha + tol);
      REQUIRE(r.limsup_est >= beta - tol);
    }
  }
}

TEST_CASE("empirical measure of a repeated fixed point is a Dirac") {
  std::vector<std::vector<double>> orbit(50, {0.3});
  avg::GridBinning binning{{0.0}, {1.0}, {10}};
  auto m = avg::empirical_measure(orbit, binning);
  REQUIRE(m.weights[3] == 1.0);
  double total = 0.0;
  for (double w : m.weights) total += w;
  REQUIRE(std::abs(total - 1.0) <= 1e-12);
}

TEST_CASE("empirical measure of a 2-cycle splits evenly") {
  std::vector<std::vector<double>> orbit;
  for (int i = 0; i < 100; ++i) orbit.push_back({i % 2 == 0 ? 0.0 : 0.5});
  avg::GridBinning binning{{0.0}, {1.0}, {2}};
  auto m = avg::empirical_measure(orbit, binning);
  REQUIRE(m.weights[0] == 0.5);
  REQUIRE(m.weights[1] == 0.5);
}

TEST_CASE("empirical measure of the x3 circle orbit matches direct counting") {
  systems::CirclePointRational theta(1, 7);
  std::vector<std::vector<double>> orbit;
  std::vector<std::size_t> counts(7, 0);
  for (int i = 0; i < 10000; ++i) {
    orbit.push_back({theta.value()});
    // direct counting oracle on the residue: p/7 falls in bin p of 7
    REQUIRE(theta.denominator == 7);
    counts[theta.numerator] += 1;
    theta = systems::circle_mult(3, theta);
  }
  avg::GridBinning binning{{0.0}, {1.0}, {7}};
  auto m = avg::empirical_measure(orbit, binning);
  for (std::size_t b = 0; b < 7; ++b)
    REQUIRE(m.weights[b] == static_cast<double>(counts[b]) / 10000.0);
}

TEST_CASE("empirical measure rejects points outside the box") {
  std::vector<std::vector<double>> orbit{{1.5}};
  avg::GridBinning binning{{0.0}, {1.0}, {4}};
  REQUIRE_THROWS_AS(avg::empirical_measure(orbit, binning), Error);
}

TEST_CASE("empirical measure weights sum to one on random orbits") {
  SplitMix64 rng(5);
  std::vector<std::vector<double>> orbit;
  for (int i = 0; i < 777; ++i) orbit.push_back({rng.next_double(), rng.next_double()});
  avg::GridBinning binning{{0.0, 0.0}, {1.0, 1.0}, {13, 9}};
  auto m = avg::empirical_measure(orbit, binning);
  double total = 0.0;
  for (double w : m.weights) total += w;
  REQUIRE(std::abs(total - 1.0) <= 1e-12);
  for (double w : m.weights) REQUIRE(w >= 0.0);
}

TEST_CASE("vT clusters: identical snapshots collapse to one") {
  std::vector<std::vector<double>> orbit(10, {0.25});
  avg::GridBinning binning{{0.0}, {1.0}, {4}};
  auto m = avg::empirical_measure(orbit, binning);
  std::vector<avg::EmpiricalMeasure> snaps(5, m);
  REQUIRE(avg::vT_cluster_report(snaps, 0.1).size() == 1);
}

TEST_CASE("vT clusters: alternating Diracs give two clusters") {
  avg::GridBinning binning{{0.0}, {1.0}, {4}};
  std::vector<std::vector<double>> o1(3, {0.1}), o2(3, {0.9});
  auto m1 = avg::empirical_measure(o1, binning);
  auto m2 = avg::empirical_measure(o2, binning);
  std::vector<avg::EmpiricalMeasure> snaps{m1, m2, m1, m2};
  REQUIRE(avg::vT_cluster_report(snaps, 0.1).size() == 2);
}

TEST_CASE("vT clusters reject mismatched binnings") {
  std::vector<std::vector<double>> o(3, {0.1});
  auto m1 = avg::empirical_measure(o, avg::GridBinning{{0.0}, {1.0}, {4}});
  auto m2 = avg::empirical_measure(o, avg::GridBinning{{0.0}, {1.0}, {8}});
  std::vector<avg::EmpiricalMeasure> snaps{m1, m2};
  REQUIRE_THROWS_AS(avg::vT_cluster_report(snaps, 0.1), Error);
}

TEST_CASE("vT clusters: Kan boundary orbit snapshots converge to one cluster") {
  // On t = 0 the dynamics is the x3 circle map with the Lebesgue limit.
  avg::GridBinning binning{{0.0}, {1.0}, {8}};
  std::vector<avg::EmpiricalMeasure> snaps;
  for (std::size_t H : {4096u, 8192u, 16384u, 32768u}) {
    systems::KanState s{0.1234567891234, 0.0};
    std::vector<std::vector<double>> orbit;
    for (std::size_t i = 0; i < H; ++i) {
      REQUIRE(s.t == 0.0);  // boundary invariance is exact
      orbit.push_back({s.x});
      s = systems::kan_step(s);
    }
    snaps.push_back(avg::empirical_measure(orbit, binning));
  }
  REQUIRE(avg::vT_cluster_report(snaps, 0.1).size() == 1);
}

TEST_CASE("transitive bounds estimate") {
  avg::OscillationReport r1, r2;
  r1.liminf_est = 0.2;
  r1.limsup_est = 0.9;
  r2.liminf_est = 0.1;
  r2.limsup_est = 0.8;
  std::vector<avg::OscillationReport> one{r1};
  auto e1 = avg::transitive_bounds_estimate(one);
  REQUIRE(e1.lstar_est == 0.2);
  REQUIRE(e1.Lstar_est == 0.9);
  std::vector<avg::OscillationReport> two{r1, r2};
  auto e2 = avg::transitive_bounds_estimate(two);
  REQUIRE(e2.lstar_est == 0.1);
  REQUIRE(e2.Lstar_est == 0.9);
  REQUIRE(e2.sample_orbits == 2);
  std::vector<avg::OscillationReport> no_reports;
  REQUIRE_THROWS_AS(avg::transitive_bounds_estimate(no_reports), Error);
}

TEST_CASE("coin-toss orbits concentrate near 1/2, block orbits do not") {
  const std::size_t H = 1u << 16;
  std::vector<avg::OscillationReport> coin_reports;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SplitMix64 rng(seed);
    std::vector<double> vals(H);
    for (auto& v : vals) v = static_cast<double>(rng.next() & 1);
    auto avgs = avg::birkhoff_partial_averages(vals, H);
    coin_reports.push_back(avg::oscillation_report(avgs, 0.25, 0.01));
  }
  auto coin = avg::transitive_bounds_estimate(coin_reports);
  REQUIRE(std::abs(coin.lstar_est - 0.5) < 0.02);
  REQUIRE(std::abs(coin.Lstar_est - 0.5) < 0.02);

  auto avgs = avg::birkhoff_partial_averages(doubling_block_values(H), H);
  std::vector<avg::OscillationReport> block{avg::oscillation_report(avgs, 0.5, 0.02)};
  auto blocked = avg::transitive_bounds_estimate(block);
  REQUIRE(blocked.lstar_est < 0.4);
  REQUIRE(blocked.Lstar_est > 0.6);
}
