#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "historic/errors.hpp"
#include "historic/kahan.hpp"

// Partial averages of an observable along an orbit, oscillation estimates,
// accumulation clusters, level-set membership, eta-Cauchy window probes and
// empirical-measure snapshots.
namespace historic::avg {

// Finite stretch of observable values along an orbit, with the admitted bound.
struct ObservableSeq {
  std::vector<double> values;
  double bound = 1.0;

  ObservableSeq(std::vector<double> v, double b) : values(std::move(v)), bound(b) {
    if (values.empty()) throw Error(ErrorCode::DOMAIN_EMPTY, "ObservableSeq needs at least one value");
    for (double x : values) {
      if (std::abs(x) > bound)
        throw Error(ErrorCode::BAD_INTERVAL, "observable value exceeds declared bound");
    }
  }
};

struct Cluster {
  double center = 0.0;
  std::size_t weight = 0;
};

// Horizon-indexed record of one average trace: estimated liminf/limsup
// (tail-window min/max), their gap, and accumulation clusters of tail values.
struct OscillationReport {
  std::size_t horizon = 0;
  std::vector<double> partial_averages;
  double liminf_est = 0.0;
  double limsup_est = 0.0;
  double gap = 0.0;
  double tail_fraction = 0.25;
  std::vector<Cluster> clusters;
};

struct LambdaProbe {
  std::size_t N = 0;
  double eta = 0.0;
  bool violated = false;
  std::optional<std::pair<std::size_t, std::size_t>> violation_pair;  // 1-based indices
};

enum class LevelSetMembership { IN_LEVEL_SET, IN_HAT_LEVEL_SET, OUTSIDE };

struct LevelSetClassification {
  double alpha = 0.0;
  double beta = 0.0;
  LevelSetMembership membership = LevelSetMembership::OUTSIDE;
  double tolerance = 0.0;
};

struct TransitiveBoundsEstimate {
  double lstar_est = 0.0;
  double Lstar_est = 0.0;
  std::size_t sample_orbits = 0;
};

// Entry n (1-based) is (1/n) * sum_{j<n} orbit_values[j], compensated.
inline std::vector<double> birkhoff_partial_averages(std::span<const double> orbit_values,
                                                     std::size_t horizon) {
  if (orbit_values.empty()) throw Error(ErrorCode::DOMAIN_EMPTY, "empty orbit");
  if (horizon < 1 || horizon > orbit_values.size())
    throw Error(ErrorCode::BAD_WINDOW, "horizon must be in [1, orbit length]");
  std::vector<double> out(horizon);
  KahanSum acc;
  for (std::size_t n = 0; n < horizon; ++n) {
    acc.add(orbit_values[n]);
    out[n] = acc.value() / static_cast<double>(n + 1);
  }
  return out;
}

namespace detail {

// Single-linkage grouping at radius tol of an ascending value list.
inline std::vector<Cluster> single_linkage(std::vector<double> sorted_vals, double tol) {
  std::vector<Cluster> clusters;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= sorted_vals.size(); ++i) {
    if (i == sorted_vals.size() || sorted_vals[i] - sorted_vals[i - 1] > tol) {
      KahanSum acc;
      for (std::size_t j = start; j < i; ++j) acc.add(sorted_vals[j]);
      clusters.push_back({acc.value() / static_cast<double>(i - start), i - start});
      start = i;
    }
  }
  return clusters;
}

}  // namespace detail

// liminf/limsup estimated as min/max over the final ceil(tail_fraction * H)
// entries; clusters by single-linkage at radius cluster_tol, ascending.
inline OscillationReport oscillation_report(std::span<const double> averages,
                                            double tail_fraction, double cluster_tol) {
  if (averages.empty()) throw Error(ErrorCode::DOMAIN_EMPTY, "empty average sequence");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw Error(ErrorCode::BAD_WINDOW, "tail_fraction must lie in (0, 1]");
  if (!(cluster_tol > 0.0)) throw Error(ErrorCode::BAD_WINDOW, "cluster_tol must be positive");

  const std::size_t H = averages.size();
  const std::size_t window =
      static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(H)));
  if (window == 0) throw Error(ErrorCode::DOMAIN_EMPTY, "tail window empty");
  const std::size_t start = H - window;

  std::vector<double> tail(averages.begin() + static_cast<std::ptrdiff_t>(start), averages.end());
  std::sort(tail.begin(), tail.end());

  OscillationReport r;
  r.horizon = H;
  r.partial_averages.assign(averages.begin(), averages.end());
  r.liminf_est = tail.front();
  r.limsup_est = tail.back();
  r.gap = r.limsup_est - r.liminf_est;
  r.tail_fraction = tail_fraction;
  r.clusters = detail::single_linkage(std::move(tail), cluster_tol);
  return r;
}

// Scans the window [N, horizon] (1-based) for a pair of averages more than
// eta apart. Streaming min/max suffices for detection; the reported witness
// is the lexicographically first violating pair (n, m), n < m.
inline LambdaProbe lambda_probe(std::span<const double> averages, std::size_t N, double eta) {
  if (N < 1 || N > averages.size())
    throw Error(ErrorCode::BAD_WINDOW, "N must be in [1, horizon]");
  if (!(eta > 0.0)) throw Error(ErrorCode::BAD_WINDOW, "eta must be positive");

  LambdaProbe probe;
  probe.N = N;
  probe.eta = eta;

  const std::size_t H = averages.size();
  // Pass 1: first index m* at which the running range over [N, m*] exceeds eta.
  double running_min = averages[N - 1];
  double running_max = running_min;
  std::size_t mstar = 0;
  for (std::size_t m = N + 1; m <= H; ++m) {
    const double a = averages[m - 1];
    running_min = std::min(running_min, a);
    running_max = std::max(running_max, a);
    if (running_max - running_min > eta) {
      mstar = m;
      break;
    }
  }
  if (mstar == 0) return probe;  // no pair violates on the whole window

  probe.violated = true;
  // Every violating pair (n, m) has m >= m*, and the pair realizing the range
  // at m* has n < m*. Suffix extremes over [m*, H] then give the minimal n.
  double suf_min = averages[mstar - 1];
  double suf_max = suf_min;
  for (std::size_t m = mstar + 1; m <= H; ++m) {
    suf_min = std::min(suf_min, averages[m - 1]);
    suf_max = std::max(suf_max, averages[m - 1]);
  }
  std::size_t n0 = 0;
  for (std::size_t n = N; n < mstar; ++n) {
    const double a = averages[n - 1];
    if (suf_max - a > eta || a - suf_min > eta) {
      n0 = n;
      break;
    }
  }
  for (std::size_t m = std::max(mstar, n0 + 1); m <= H; ++m) {
    if (std::abs(averages[n0 - 1] - averages[m - 1]) > eta) {
      probe.violation_pair = {n0, m};
      break;
    }
  }
  return probe;
}

inline LevelSetClassification classify_level_set(const OscillationReport& report, double alpha,
                                                 double beta, double tol) {
  if (alpha > beta) throw Error(ErrorCode::BAD_INTERVAL, "alpha must not exceed beta");
  if (!(tol > 0.0)) throw Error(ErrorCode::BAD_INTERVAL, "tolerance must be positive");
  LevelSetClassification c;
  c.alpha = alpha;
  c.beta = beta;
  c.tolerance = tol;
  const bool in_level = std::abs(report.liminf_est - alpha) <= tol &&
                        std::abs(report.limsup_est - beta) <= tol;
  const bool in_hat = report.liminf_est <= alpha + tol && report.limsup_est >= beta - tol;
  if (in_level) {
    c.membership = LevelSetMembership::IN_LEVEL_SET;
  } else if (in_hat) {
    c.membership = LevelSetMembership::IN_HAT_LEVEL_SET;
  } else {
    c.membership = LevelSetMembership::OUTSIDE;
  }
  return c;
}

// Axis-aligned uniform grid over a box, shared by empirical measures.
struct GridBinning {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::size_t> bins_per_dim;

  std::size_t total_bins() const {
    std::size_t n = 1;
    for (std::size_t b : bins_per_dim) n *= b;
    return n;
  }

  bool same_as(const GridBinning& o) const {
    return lo == o.lo && hi == o.hi && bins_per_dim == o.bins_per_dim;
  }

  std::size_t bin_index(std::span<const double> point) const {
    if (point.size() != lo.size())
      throw Error(ErrorCode::OUT_OF_BOX, "point dimension does not match binning");
    std::size_t idx = 0;
    for (std::size_t d = 0; d < lo.size(); ++d) {
      if (point[d] < lo[d] || point[d] > hi[d])
        throw Error(ErrorCode::OUT_OF_BOX, "point outside binning box");
      const double span = hi[d] - lo[d];
      auto b = static_cast<std::size_t>((point[d] - lo[d]) / span *
                                        static_cast<double>(bins_per_dim[d]));
      if (b >= bins_per_dim[d]) b = bins_per_dim[d] - 1;  // right edge
      idx = idx * bins_per_dim[d] + b;
    }
    return idx;
  }
};

struct EmpiricalMeasure {
  GridBinning binning;
  std::vector<double> weights;  // nonnegative, sums to 1
};

inline EmpiricalMeasure empirical_measure(std::span<const std::vector<double>> orbit_points,
                                          const GridBinning& binning) {
  if (orbit_points.empty()) throw Error(ErrorCode::DOMAIN_EMPTY, "empty orbit");
  std::vector<std::size_t> counts(binning.total_bins(), 0);
  for (const auto& p : orbit_points) ++counts[binning.bin_index(p)];
  EmpiricalMeasure m;
  m.binning = binning;
  m.weights.resize(counts.size());
  const double n = static_cast<double>(orbit_points.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    m.weights[i] = static_cast<double>(counts[i]) / n;
  return m;
}

// Total variation on the shared grid: (1/2) sum |w - w'|.
inline double total_variation(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  if (!a.binning.same_as(b.binning))
    throw Error(ErrorCode::BIN_MISMATCH, "empirical measures use different binnings");
  KahanSum acc;
  for (std::size_t i = 0; i < a.weights.size(); ++i)
    acc.add(std::abs(a.weights[i] - b.weights[i]));
  return 0.5 * acc.value();
}

// Single-linkage clustering of snapshots under TV distance <= tol; one
// representative (the first member) per cluster. Two or more clusters is the
// finite-resolution proxy for a non-convergent empirical-measure sequence.
inline std::vector<EmpiricalMeasure> vT_cluster_report(std::span<const EmpiricalMeasure> snapshots,
                                                       double tol) {
  if (snapshots.empty()) throw Error(ErrorCode::DOMAIN_EMPTY, "no snapshots");
  if (!(tol > 0.0)) throw Error(ErrorCode::BAD_WINDOW, "tol must be positive");
  const std::size_t n = snapshots.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (total_variation(snapshots[i], snapshots[j]) <= tol) {
        auto a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  std::vector<EmpiricalMeasure> reps;
  for (std::size_t i = 0; i < n; ++i)
    if (find(i) == i) reps.push_back(snapshots[i]);
  return reps;
}

// Sampled-orbit bounds for the transitive oscillation extremes: the estimate
// brackets from inside (lstar_est >= the true infimum over transitive points,
// Lstar_est <= the true supremum).
inline TransitiveBoundsEstimate transitive_bounds_estimate(
    std::span<const OscillationReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::DOMAIN_EMPTY, "no reports");
  TransitiveBoundsEstimate e;
  e.lstar_est = reports.front().liminf_est;
  e.Lstar_est = reports.front().limsup_est;
  e.sample_orbits = reports.size();
  for (const auto& r : reports) {
    e.lstar_est = std::min(e.lstar_est, r.liminf_est);
    e.Lstar_est = std::max(e.Lstar_est, r.limsup_est);
  }
  return e;
}

}  // namespace historic::avg
