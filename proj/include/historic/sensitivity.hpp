#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "historic/avg.hpp"
#include "historic/errors.hpp"
#include "historic/symbolic.hpp"

// Empirical sensitivity testing: two finite sample nets stand in for the
// dense sets of the definition, the gap between accumulation clusters of
// their average traces is estimated, and the weakest pair is reported as the
// witness. Also the finite-resolution orbit-density diagnostic.
namespace historic::sensitivity {

enum class NetProvenance { GRID, ORBIT_SEGMENT, PREIMAGE_TREE, USER };

// Finite stand-in for a dense set, with its claimed covering radius. The mesh
// is reported alongside every verdict; density itself is never certified.
template <typename Point>
struct SampleNet {
  std::vector<Point> points;
  double mesh = 0.0;
  NetProvenance provenance = NetProvenance::USER;
};

enum class Pairing { ALL_PAIRS, DIAGONAL };

struct SensitivityWitness {
  std::size_t a_index = 0;
  std::size_t b_index = 0;
  double r_a = 0.0;  // cluster values realizing the pair's best separation
  double r_b = 0.0;
};

struct SensitivityVerdict {
  bool sensitive = false;
  double epsilon_est = 0.0;
  std::optional<SensitivityWitness> witness;
  std::size_t horizon = 0;
  double cluster_tol = 0.0;
  double mesh_a = 0.0;
  double mesh_b = 0.0;
};

// epsilon_est = min over the required pairs of (max over cluster pairs
// |r - s|): the weakest link realizes the universal quantifier over (a, b).
// "Sensitive" demands epsilon_est > 2 * cluster_tol so that clustering noise
// alone never produces a positive verdict.
template <typename Point>
SensitivityVerdict sensitivity_test(const SampleNet<Point>& net_a, const SampleNet<Point>& net_b,
                                    const std::function<avg::OscillationReport(const Point&)>& trace,
                                    Pairing pairing, double cluster_tol) {
  if (net_a.points.empty() || net_b.points.empty())
    throw Error(ErrorCode::DOMAIN_EMPTY, "sample nets must be nonempty");
  if (pairing == Pairing::DIAGONAL && net_a.points.size() != net_b.points.size())
    throw Error(ErrorCode::TRACE_MISMATCH, "diagonal pairing needs nets of equal size");

  std::vector<avg::OscillationReport> reports_a, reports_b;
  reports_a.reserve(net_a.points.size());
  reports_b.reserve(net_b.points.size());
  for (const auto& p : net_a.points) reports_a.push_back(trace(p));
  for (const auto& p : net_b.points) reports_b.push_back(trace(p));
  const std::size_t horizon = reports_a.front().horizon;
  for (const auto& r : reports_a)
    if (r.horizon != horizon) throw Error(ErrorCode::TRACE_MISMATCH, "horizon mismatch in net A");
  for (const auto& r : reports_b)
    if (r.horizon != horizon) throw Error(ErrorCode::TRACE_MISMATCH, "horizon mismatch in net B");

  SensitivityVerdict verdict;
  verdict.horizon = horizon;
  verdict.cluster_tol = cluster_tol;
  verdict.mesh_a = net_a.mesh;
  verdict.mesh_b = net_b.mesh;

  auto pair_gap = [](const avg::OscillationReport& ra, const avg::OscillationReport& rb,
                     SensitivityWitness& w) {
    double best = -1.0;
    for (const auto& ca : ra.clusters)
      for (const auto& cb : rb.clusters) {
        const double g = std::abs(ca.center - cb.center);
        if (g > best) {
          best = g;
          w.r_a = ca.center;
          w.r_b = cb.center;
        }
      }
    return best;
  };

  bool first = true;
  auto consider = [&](std::size_t i, std::size_t j) {
    SensitivityWitness w;
    w.a_index = i;
    w.b_index = j;
    const double g = pair_gap(reports_a[i], reports_b[j], w);
    if (first || g < verdict.epsilon_est) {
      verdict.epsilon_est = g;
      verdict.witness = w;
      first = false;
    }
  };

  if (pairing == Pairing::ALL_PAIRS) {
    for (std::size_t i = 0; i < reports_a.size(); ++i)
      for (std::size_t j = 0; j < reports_b.size(); ++j) consider(i, j);
  } else {
    for (std::size_t i = 0; i < reports_a.size(); ++i) consider(i, i);
  }

  verdict.sensitive = verdict.epsilon_est > 2.0 * cluster_tol;
  if (!verdict.sensitive) verdict.witness.reset();
  return verdict;
}

struct OrbitDensityDiagnostic {
  double covered_fraction = 0.0;
  double resolution = 0.0;
  std::size_t orbit_length = 0;
};

// Visited fraction of resolution cells of the ambient box. A diagnostic only:
// a finite orbit can never certify density.
inline OrbitDensityDiagnostic orbit_density(std::span<const std::vector<double>> orbit_points,
                                            const std::vector<double>& box_lo,
                                            const std::vector<double>& box_hi, double resolution) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::BAD_WINDOW, "resolution must be positive");
  avg::GridBinning binning;
  binning.lo = box_lo;
  binning.hi = box_hi;
  for (std::size_t d = 0; d < box_lo.size(); ++d) {
    auto cells = static_cast<std::size_t>(std::ceil((box_hi[d] - box_lo[d]) / resolution));
    binning.bins_per_dim.push_back(std::max<std::size_t>(cells, 1));
  }
  std::vector<std::uint8_t> visited(binning.total_bins(), 0);
  for (const auto& p : orbit_points) visited[binning.bin_index(p)] = 1;
  std::size_t count = 0;
  for (auto v : visited) count += v;
  OrbitDensityDiagnostic diag;
  diag.covered_fraction = static_cast<double>(count) / static_cast<double>(visited.size());
  diag.resolution = resolution;
  diag.orbit_length = orbit_points.size();
  return diag;
}

// Depth-w cylinder occupancy of a symbolic orbit: each window of the word is
// one cell out of alphabet_size^depth.
inline OrbitDensityDiagnostic cylinder_density(const symbolic::SymbolicPoint& point,
                                               std::size_t orbit_length, std::size_t depth,
                                               std::size_t alphabet_size) {
  std::size_t cells = 1;
  for (std::size_t i = 0; i < depth; ++i) cells *= alphabet_size;
  auto symbols = point.prefix(orbit_length + depth - 1);
  std::vector<std::uint8_t> visited(cells, 0);
  for (std::size_t j = 0; j < orbit_length; ++j) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < depth; ++i) idx = idx * alphabet_size + symbols[j + i];
    visited[idx] = 1;
  }
  std::size_t count = 0;
  for (auto v : visited) count += v;
  OrbitDensityDiagnostic diag;
  diag.covered_fraction = static_cast<double>(count) / static_cast<double>(cells);
  diag.resolution = std::pow(static_cast<double>(alphabet_size), -static_cast<double>(depth));
  diag.orbit_length = orbit_length;
  return diag;
}

enum class DichotomyBranch { RIGID_NO_IRREGULARITY_INDICATED, SENSITIVE };

struct DichotomyReport {
  DichotomyBranch branch = DichotomyBranch::RIGID_NO_IRREGULARITY_INDICATED;
  symbolic::RigidityResult rigidity;
  // SENSITIVE branch: exact gap between the extremal periodic averages and
  // the finite-horizon sensitivity verdict on the two periodic points.
  double witness_gap = 0.0;
  std::optional<SensitivityVerdict> verdict;
};

// Combines the periodic-orbit rigidity test with the empirical sensitivity
// test on the extremal periodic points; the two branches are mutually
// exclusive by construction.
inline DichotomyReport dichotomy_report(const symbolic::TransitionMatrix& sft,
                                        const symbolic::SymbolObservable& obs,
                                        std::size_t max_period, std::size_t horizon,
                                        double tol = 1e-9, double cluster_tol = 1e-3,
                                        double tail_fraction = 0.25) {
  if (!sft.mixing()) throw Error(ErrorCode::NOT_MIXING, "dichotomy requires a mixing SFT");
  DichotomyReport report;
  report.rigidity = symbolic::rigidity_test(sft, obs, max_period, tol);
  if (report.rigidity.verdict == symbolic::RigidityVerdict::RIGID) {
    report.branch = DichotomyBranch::RIGID_NO_IRREGULARITY_INDICATED;
    return report;
  }
  report.branch = DichotomyBranch::SENSITIVE;
  report.witness_gap = report.rigidity.average_high - report.rigidity.average_low;

  SampleNet<symbolic::Word> net_a{{report.rigidity.witness_low}, 1.0, NetProvenance::USER};
  SampleNet<symbolic::Word> net_b{{report.rigidity.witness_high}, 1.0, NetProvenance::USER};
  std::function<avg::OscillationReport(const symbolic::Word&)> trace =
      [&](const symbolic::Word& cycle) {
        auto point = symbolic::SymbolicPoint::periodic(cycle);
        auto values = symbolic::observable_trace(point, obs, horizon);
        auto averages = avg::birkhoff_partial_averages(values, horizon);
        return avg::oscillation_report(averages, tail_fraction, cluster_tol);
      };
  report.verdict = sensitivity_test(net_a, net_b, trace, Pairing::ALL_PAIRS, cluster_tol);
  return report;
}

}  // namespace historic::sensitivity
