#pragma once

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "historic/avg.hpp"
#include "historic/errors.hpp"
#include "historic/group_avg.hpp"
#include "historic/rng.hpp"
#include "historic/sensitivity.hpp"
#include "historic/symbolic.hpp"
#include "historic/systems.hpp"

// CLI back-end: scenario configs, the preset registry, deterministic
// execution, and CSV/JSON artifact writing.
namespace historic::harness {

inline constexpr const char* kVersion = "historic 0.1.0";

struct ScenarioConfig {
  std::string scenario;
  std::size_t horizon = 0;  // 0 = use the preset default
  std::vector<std::uint64_t> seeds;
  double tail_fraction = 0.25;
  double cluster_tol = 1e-3;
  double level_tol = 1e-2;
  std::string output_dir = "out";
  // INLINE scenarios (shift block-schedule systems only)
  std::string system_type;      // "shift"
  std::string schedule_rule;    // "geometric" | "superlinear"
  std::uint64_t ratio = 2;
  std::string prefix;           // symbol digits prepended to the block word
  std::string observable_type;  // "first_symbol"
  std::string scheme;           // "birkhoff"
};

struct ConfigViolation {
  std::string path;
  std::string message;
};

// JSON emitter with caller-ordered keys, LF line endings and floating point
// printed with 17 significant digits, so identical runs are byte-identical.
class JsonWriter {
 public:
  void begin_object() { open('{'); }
  void end_object() { close('}'); }
  void begin_array() { open('['); }
  void end_array() { close(']'); }

  void key(const std::string& k) {
    comma();
    out_ += '"';
    escape(k);
    out_ += "\":";
    pending_value_ = true;
  }

  void value(const std::string& s) {
    comma();
    out_ += '"';
    escape(s);
    out_ += '"';
  }
  void value(const char* s) { value(std::string(s)); }
  void value(double d) {
    comma();
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    out_ += buf;
  }
  void value(bool b) {
    comma();
    out_ += b ? "true" : "false";
  }
  void value(std::uint64_t v) {
    comma();
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%" PRIu64, v);
    out_ += buf;
  }
  void value(std::int64_t v) {
    comma();
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%" PRId64, v);
    out_ += buf;
  }
  void value(int v) { value(static_cast<std::int64_t>(v)); }

  const std::string& str() const { return out_; }

 private:
  void open(char c) {
    comma();
    out_ += c;
    first_.push_back(true);
  }
  void close(char c) {
    out_ += c;
    first_.pop_back();
  }
  void comma() {
    if (pending_value_) {
      pending_value_ = false;
      return;
    }
    if (!first_.empty()) {
      if (!first_.back()) out_ += ',';
      first_.back() = false;
    }
  }
  void escape(const std::string& s) {
    for (char c : s) {
      if (c == '"' || c == '\\') {
        out_ += '\\';
        out_ += c;
      } else if (c == '\n') {
        out_ += "\\n";
      } else {
        out_ += c;
      }
    }
  }

  std::string out_;
  std::vector<bool> first_;
  bool pending_value_ = false;
};

inline std::string format_double(double d) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", d);
  return buf;
}

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string fnv1a64_hex(const std::string& data) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(data));
  return buf;
}

struct Artifact {
  std::string name;
  std::string digest;
};

struct RunManifest {
  std::string scenario;
  std::vector<Artifact> artifacts;
  double wall_clock_seconds = 0.0;
  std::string version;
  std::filesystem::path output_dir;
};

struct PresetInfo {
  std::string name;
  std::string description;
  std::size_t default_horizon;
  double default_tail_fraction;
};

inline const std::vector<PresetInfo>& preset_registry() {
  static const std::vector<PresetInfo> presets = {
      {"shift-blocks-geometric",
       "oscillating 2-shift point with geometric run lengths, Birkhoff trace", 1u << 20, 0.5},
      {"shift-blocks-superlinear",
       "oscillating 2-shift point with superlinear run lengths, Birkhoff trace", 1000000, 1.0},
      {"cylinder-density",
       "in-cylinder oscillation witnesses for every depth-8 cylinder of the 2-shift", 1u << 20,
       0.5},
      {"lambda-probe", "eta-Cauchy window violations along the geometric block point", 1u << 20,
       0.5},
      {"rigidity-goldenmean", "periodic-average rigidity test on the golden-mean shift", 0, 0.25},
      {"dichotomy-full-2-shift", "rigid-or-sensitive dichotomy for the full 2-shift", 4096, 0.25},
      {"folner-z2-fixedpoint", "Folner box averages of the Z^2 toral action at the fixed point",
       10, 0.25},
      {"folner-z2-orbit", "Folner box averages along a rational torus point mod 5", 6, 0.25},
      {"spherical-z4z6", "spherical averages of the z^4/z^6 semigroup at theta = 1/7", 50, 0.25},
      {"cesaro-preorbit",
       "Cesaro-spherical convergence on pre-orbit witnesses with a+b <= 4", 200, 0.25},
      {"psi-bound", "double-average remainder bound on pre-orbit witnesses", 1000, 0.25},
      {"kan-intermingled", "basin labels of the Kan skew product over an 8x8 grid", 100000, 0.25},
      {"tempered-boxes", "tempered constant certification for the square Folner boxes", 100, 0.25},
      {"empirical-x3-circle", "empirical measure of the x3 circle map from theta = 1/7", 10000,
       0.25},
      {"coin-shift-density", "depth-8 cylinder coverage of a seeded coin-toss orbit", 1u << 16,
       0.25},
      {"markov-renewal-truncation", "pruned finite truncation of the renewal-shift rule", 8, 0.25},
  };
  return presets;
}

inline std::vector<std::pair<std::string, std::string>> list_presets() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& p : preset_registry()) out.emplace_back(p.name, p.description);
  return out;
}

inline const PresetInfo* find_preset(const std::string& name) {
  for (const auto& p : preset_registry())
    if (p.name == name) return &p;
  return nullptr;
}

// Parses raw JSON into a config with defaults applied, or lists every
// violation with its field path.
inline ScenarioConfig validate_config(const std::string& raw,
                                      std::vector<ConfigViolation>& violations) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::PARSE_ERROR,
                "malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  ScenarioConfig c;
  if (!j.is_object()) {
    violations.push_back({"", "config must be a JSON object"});
    return c;
  }
  if (!j.contains("scenario") || !j["scenario"].is_string()) {
    violations.push_back({"scenario", "required string field"});
  } else {
    c.scenario = j["scenario"].get<std::string>();
    if (c.scenario != "INLINE" && find_preset(c.scenario) == nullptr)
      violations.push_back({"scenario", "unknown scenario '" + c.scenario + "'"});
  }
  if (j.contains("horizon")) {
    if (!j["horizon"].is_number_unsigned() || j["horizon"].get<std::uint64_t>() == 0)
      violations.push_back({"horizon", "must be a positive integer"});
    else
      c.horizon = j["horizon"].get<std::size_t>();
  }
  if (j.contains("seeds")) {
    if (!j["seeds"].is_array()) {
      violations.push_back({"seeds", "must be an array of integers"});
    } else {
      for (std::size_t i = 0; i < j["seeds"].size(); ++i) {
        if (!j["seeds"][i].is_number_integer())
          violations.push_back({"seeds[" + std::to_string(i) + "]", "must be an integer"});
        else
          c.seeds.push_back(j["seeds"][i].get<std::uint64_t>());
      }
    }
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object()) {
      violations.push_back({"tolerances", "must be an object"});
    } else {
      auto get_pos = [&](const char* name, double& dst) {
        if (!t.contains(name)) return;
        if (!t[name].is_number() || !(t[name].get<double>() > 0.0))
          violations.push_back({std::string("tolerances.") + name, "must be a positive number"});
        else
          dst = t[name].get<double>();
      };
      get_pos("tail_fraction", c.tail_fraction);
      get_pos("cluster_tol", c.cluster_tol);
      get_pos("level_tol", c.level_tol);
      if (c.tail_fraction > 1.0)
        violations.push_back({"tolerances.tail_fraction", "must lie in (0, 1]"});
    }
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string())
      violations.push_back({"output_dir", "must be a string"});
    else
      c.output_dir = j["output_dir"].get<std::string>();
  }
  if (c.scenario == "INLINE") {
    auto get_str = [&](const char* name, std::string& dst, bool required) {
      if (j.contains(name) && j[name].is_string()) {
        dst = j[name].get<std::string>();
      } else if (required) {
        violations.push_back({name, "required string field for INLINE scenarios"});
      }
    };
    get_str("system", c.system_type, true);
    get_str("schedule", c.schedule_rule, true);
    get_str("observable", c.observable_type, true);
    get_str("scheme", c.scheme, true);
    get_str("prefix", c.prefix, false);
    if (j.contains("ratio")) {
      if (!j["ratio"].is_number_unsigned() || j["ratio"].get<std::uint64_t>() < 2)
        violations.push_back({"ratio", "must be an integer >= 2"});
      else
        c.ratio = j["ratio"].get<std::uint64_t>();
    }
    if (!c.system_type.empty() && c.system_type != "shift")
      violations.push_back({"system", "only 'shift' is supported inline"});
    if (!c.schedule_rule.empty() && c.schedule_rule != "geometric" &&
        c.schedule_rule != "superlinear")
      violations.push_back({"schedule", "must be 'geometric' or 'superlinear'"});
    if (!c.observable_type.empty() && c.observable_type != "first_symbol")
      violations.push_back({"observable", "only 'first_symbol' is supported inline"});
    if (!c.scheme.empty() && c.scheme != "birkhoff")
      violations.push_back({"scheme", "only 'birkhoff' is supported inline"});
    if (c.horizon == 0) violations.push_back({"horizon", "required for INLINE scenarios"});
  }
  return c;
}

namespace detail {

struct ScenarioOutput {
  // file name -> full contents (written with LF endings as-is)
  std::vector<std::pair<std::string, std::string>> files;
};

inline void emit_oscillation(JsonWriter& w, const avg::OscillationReport& r) {
  w.begin_object();
  w.key("horizon");
  w.value(r.horizon);
  w.key("liminf_est");
  w.value(r.liminf_est);
  w.key("limsup_est");
  w.value(r.limsup_est);
  w.key("gap");
  w.value(r.gap);
  w.key("tail_fraction");
  w.value(r.tail_fraction);
  w.key("clusters");
  w.begin_array();
  for (const auto& c : r.clusters) {
    w.begin_object();
    w.key("center");
    w.value(c.center);
    w.key("weight");
    w.value(c.weight);
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

inline std::string trace_csv(const std::string& scheme, const std::string& point,
                             std::span<const double> values, std::size_t stride = 1) {
  std::string csv = "scheme,point,n,value\n";
  for (std::size_t n = 1; n <= values.size(); ++n) {
    if (n % stride != 0 && n != values.size()) continue;
    csv += scheme;
    csv += ',';
    csv += point;
    csv += ',';
    csv += std::to_string(n);
    csv += ',';
    csv += format_double(values[n - 1]);
    csv += '\n';
  }
  return csv;
}

// Birkhoff trace of a block-schedule point; shared by several presets.
inline avg::OscillationReport block_point_report(const symbolic::BlockSchedule& schedule,
                                                 const std::string& prefix, std::size_t horizon,
                                                 double tail_fraction, double cluster_tol,
                                                 std::vector<double>* averages_out = nullptr) {
  auto point = symbolic::SymbolicPoint::block_schedule(symbolic::word_from_string(prefix),
                                                       schedule);
  auto values = symbolic::observable_trace(point, symbolic::first_symbol_observable(), horizon);
  auto averages = avg::birkhoff_partial_averages(values, horizon);
  auto report = avg::oscillation_report(averages, tail_fraction, cluster_tol);
  if (averages_out) *averages_out = std::move(averages);
  report.partial_averages.clear();  // the trace goes to averages.csv, not JSON
  return report;
}

inline void run_block_scenario(const ScenarioConfig& c, const symbolic::BlockSchedule& schedule,
                               const std::string& scheme_name, JsonWriter& report,
                               ScenarioOutput& out) {
  std::vector<double> averages;
  auto r = block_point_report(schedule, c.prefix, c.horizon, c.tail_fraction, c.cluster_tol,
                              &averages);
  const std::size_t stride = averages.size() > 65536 ? averages.size() / 65536 : 1;
  out.files.emplace_back("averages.csv", trace_csv(scheme_name, "block-point", averages, stride));
  report.key("oscillation");
  emit_oscillation(report, r);
  // gap > threshold is an irregularity indication at this horizon, not a proof
  report.key("irregularity_indicated");
  report.value(r.gap > c.level_tol);
}

inline void scenario_cylinder_density(const ScenarioConfig& c, JsonWriter& report,
                                      ScenarioOutput& out) {
  const std::size_t depth = 8;
  auto sft = symbolic::TransitionMatrix::full_shift(2);
  auto schedule = symbolic::BlockSchedule::geometric(2);
  std::string csv = "cylinder,gap,liminf_est,limsup_est\n";
  double min_gap = 2.0;
  const std::size_t n_cyl = std::size_t{1} << depth;
  for (std::size_t code = 0; code < n_cyl; ++code) {
    symbolic::Word w(depth);
    for (std::size_t i = 0; i < depth; ++i) w[i] = (code >> (depth - 1 - i)) & 1;
    auto point = symbolic::cylinder_irregular_witness({w}, schedule, sft);
    auto values = symbolic::observable_trace(point, symbolic::first_symbol_observable(), c.horizon);
    auto averages = avg::birkhoff_partial_averages(values, c.horizon);
    auto r = avg::oscillation_report(averages, c.tail_fraction, c.cluster_tol);
    min_gap = std::min(min_gap, r.gap);
    csv += symbolic::word_to_string(w) + "," + format_double(r.gap) + "," +
           format_double(r.liminf_est) + "," + format_double(r.limsup_est) + "\n";
  }
  out.files.emplace_back("cylinders.csv", csv);
  report.key("depth");
  report.value(depth);
  report.key("cylinders");
  report.value(n_cyl);
  report.key("min_gap");
  report.value(min_gap);
}

inline void scenario_lambda_probe(const ScenarioConfig& c, JsonWriter& report,
                                  ScenarioOutput& out) {
  std::vector<double> averages;
  block_point_report(symbolic::BlockSchedule::geometric(2), "", c.horizon, c.tail_fraction,
                     c.cluster_tol, &averages);
  const double eta = 0.1;
  std::string csv = "N,eta,violated,pair_n,pair_m\n";
  report.key("eta");
  report.value(eta);
  report.key("probes");
  report.begin_array();
  for (std::size_t N : {std::size_t{1}, std::size_t{10}, std::size_t{100}, std::size_t{1000},
                        std::size_t{10000}}) {
    auto probe = avg::lambda_probe(averages, N, eta);
    csv += std::to_string(probe.N) + "," + format_double(probe.eta) + "," +
           (probe.violated ? "true" : "false") + ",";
    csv += probe.violation_pair ? std::to_string(probe.violation_pair->first) : "";
    csv += ",";
    csv += probe.violation_pair ? std::to_string(probe.violation_pair->second) : "";
    csv += "\n";
    report.begin_object();
    report.key("N");
    report.value(probe.N);
    report.key("eta");
    report.value(probe.eta);
    report.key("violated");
    report.value(probe.violated);
    if (probe.violation_pair) {
      report.key("violation_pair");
      report.begin_array();
      report.value(probe.violation_pair->first);
      report.value(probe.violation_pair->second);
      report.end_array();
    }
    report.end_object();
  }
  report.end_array();
  out.files.emplace_back("probes.csv", csv);
}

inline void emit_rigidity(JsonWriter& w, const symbolic::RigidityResult& r) {
  w.begin_object();
  w.key("verdict");
  w.value(r.verdict == symbolic::RigidityVerdict::RIGID ? "RIGID" : "NON_RIGID");
  w.key("tolerance");
  w.value(r.tolerance);
  if (r.verdict == symbolic::RigidityVerdict::RIGID) {
    w.key("c_phi");
    w.value(r.c_phi);
  } else {
    w.key("witness_low");
    w.value(symbolic::word_to_string(r.witness_low));
    w.key("witness_high");
    w.value(symbolic::word_to_string(r.witness_high));
    w.key("average_low");
    w.value(r.average_low);
    w.key("average_high");
    w.value(r.average_high);
  }
  w.end_object();
}

inline void scenario_rigidity_goldenmean(const ScenarioConfig&, JsonWriter& report,
                                         ScenarioOutput&) {
  auto sft = symbolic::TransitionMatrix::golden_mean();
  auto r = symbolic::rigidity_test(sft, symbolic::first_symbol_observable(), 6, 1e-9);
  report.key("rigidity");
  emit_rigidity(report, r);
}

inline void scenario_dichotomy_full_shift(const ScenarioConfig& c, JsonWriter& report,
                                          ScenarioOutput&) {
  auto sft = symbolic::TransitionMatrix::full_shift(2);
  auto d = sensitivity::dichotomy_report(sft, symbolic::first_symbol_observable(), 4, c.horizon,
                                         1e-9, c.cluster_tol, c.tail_fraction);
  report.key("branch");
  report.value(d.branch == sensitivity::DichotomyBranch::SENSITIVE
                   ? "SENSITIVE"
                   : "RIGID_NO_IRREGULARITY_INDICATED");
  report.key("rigidity");
  emit_rigidity(report, d.rigidity);
  if (d.branch == sensitivity::DichotomyBranch::SENSITIVE) {
    report.key("witness_gap");
    report.value(d.witness_gap);
    report.key("epsilon_est");
    report.value(d.verdict->epsilon_est);
  }
}

inline void scenario_folner(const ScenarioConfig& c, bool fixed_point, JsonWriter& report,
                            ScenarioOutput& out) {
  const systems::TorusPointExact p = fixed_point ? systems::TorusPointExact(5, 0, 0)
                                                 : systems::TorusPointExact(5, 1, 0);
  groupavg::TorusObservable obs{
      [](const systems::TorusPointExact& q) { return q.a == 0 && q.b == 0 ? 1.0 : 0.0; }, 1.0};
  std::vector<double> values;
  for (std::size_t n = 0; n <= c.horizon; ++n)
    values.push_back(groupavg::folner_average(p, obs, static_cast<std::int64_t>(n)));
  std::string csv = "scheme,point,n,value\n";
  for (std::size_t n = 0; n <= c.horizon; ++n)
    csv += "folner,\"" + p.str() + "\"," + std::to_string(n) + "," + format_double(values[n]) +
           "\n";  // the point itself contains a comma, so the field is quoted
  out.files.emplace_back("averages.csv", csv);
  report.key("point");
  report.value(p.str());
  report.key("values");
  report.begin_array();
  for (double v : values) report.value(v);
  report.end_array();
}

inline void scenario_spherical(const ScenarioConfig& c, JsonWriter& report, ScenarioOutput& out) {
  const systems::CirclePointRational theta(1, 7);
  auto obs = groupavg::cos_observable();
  std::vector<double> values;
  for (std::size_t k = 0; k <= c.horizon; ++k)
    values.push_back(groupavg::spherical_average(theta, obs, k));
  out.files.emplace_back("averages.csv", trace_csv("spherical", theta.str(), values));
  report.key("theta");
  report.value(theta.str());
  report.key("final_value");
  report.value(values.back());
}

inline void scenario_cesaro_preorbit(const ScenarioConfig& c, JsonWriter& report,
                                     ScenarioOutput& out) {
  auto obs = groupavg::cos_observable();
  const systems::CirclePointRational z0(0, 1);
  std::string csv = "scheme,point,n,value\n";
  report.key("witnesses");
  report.begin_array();
  for (std::uint64_t a = 0; a <= 4; ++a) {
    for (std::uint64_t b = 0; a + b <= 4; ++b) {
      auto w = groupavg::preorbit_construct(z0, a, b, a + b == 0 ? 0 : 1);
      const double e20 = std::abs(groupavg::cesaro_spherical(w.theta, obs, 20) - obs(z0));
      const double efinal =
          std::abs(groupavg::cesaro_spherical(w.theta, obs, c.horizon) - obs(z0));
      csv += "cesaro-spherical," + w.theta.str() + ",20," + format_double(e20) + "\n";
      csv += "cesaro-spherical," + w.theta.str() + "," + std::to_string(c.horizon) + "," +
             format_double(efinal) + "\n";
      report.begin_object();
      report.key("theta");
      report.value(w.theta.str());
      report.key("a");
      report.value(w.a);
      report.key("b");
      report.value(w.b);
      report.key("error_at_20");
      report.value(e20);
      report.key("error_at_horizon");
      report.value(efinal);
      report.end_object();
    }
  }
  report.end_array();
  out.files.emplace_back("averages.csv", csv);
}

inline void scenario_psi_bound(const ScenarioConfig& c, JsonWriter& report, ScenarioOutput& out) {
  auto obs = groupavg::cos_observable();
  const systems::CirclePointRational z0(0, 1);
  std::string csv = "n,lhs,bound,holds\n";
  bool all_hold = true;
  report.key("witnesses");
  report.begin_array();
  const std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs = {
      {0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 1}};
  for (auto [a, b] : pairs) {
    auto w = groupavg::preorbit_construct(z0, a, b, a + b == 0 ? 0 : 1);
    const std::size_t n_min = std::max<std::size_t>(2, std::max(a, b) + 1);
    auto results = groupavg::psi_error_bound_scan(w, obs, n_min, c.horizon);
    bool witness_holds = true;
    for (const auto& r : results) {
      witness_holds &= r.holds;
      csv += std::to_string(r.n) + "," + format_double(r.lhs) + "," + format_double(r.bound) +
             "," + (r.holds ? "true" : "false") + "\n";
    }
    all_hold &= witness_holds;
    report.begin_object();
    report.key("theta");
    report.value(w.theta.str());
    report.key("a");
    report.value(w.a);
    report.key("b");
    report.value(w.b);
    report.key("holds");
    report.value(witness_holds);
    report.end_object();
  }
  report.end_array();
  report.key("all_hold");
  report.value(all_hold);
  out.files.emplace_back("bounds.csv", csv);
}

inline void scenario_kan(const ScenarioConfig& c, JsonWriter& report, ScenarioOutput& out) {
  const std::size_t grid = 8, samples_per_box = 200;
  const std::uint64_t seed = c.seeds.empty() ? 7 : c.seeds.front();
  std::string csv = "box_i,box_j,n_B0,n_B1,n_undecided\n";
  std::size_t total_decided = 0;
  bool all_boxes_mixed = true;
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = 0; j < grid; ++j) {
      // one deterministic stream per box, independent of traversal order
      SplitMix64 rng(seed ^ (0x100000001ULL * (i * grid + j + 1)));
      std::size_t n0 = 0, n1 = 0, nu = 0;
      for (std::size_t s = 0; s < samples_per_box; ++s) {
        systems::KanState state;
        state.x = (static_cast<double>(i) + rng.next_double()) / static_cast<double>(grid);
        state.t = (static_cast<double>(j) + rng.next_double()) / static_cast<double>(grid);
        auto cls = systems::kan_basin_classify(state, c.horizon);
        if (cls.label == systems::BasinLabel::B0) ++n0;
        else if (cls.label == systems::BasinLabel::B1) ++n1;
        else ++nu;
      }
      total_decided += n0 + n1;
      all_boxes_mixed &= (n0 > 0 && n1 > 0);
      csv += std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(n0) + "," +
             std::to_string(n1) + "," + std::to_string(nu) + "\n";
    }
  }
  out.files.emplace_back("basins.csv", csv);
  report.key("seed");
  report.value(seed);
  report.key("grid");
  report.value(grid);
  report.key("samples_per_box");
  report.value(samples_per_box);
  report.key("decided_fraction");
  report.value(static_cast<double>(total_decided) /
               static_cast<double>(grid * grid * samples_per_box));
  report.key("all_boxes_mixed");
  report.value(all_boxes_mixed);
}

inline void scenario_tempered(const ScenarioConfig& c, JsonWriter& report, ScenarioOutput&) {
  auto r = groupavg::tempered_check(c.horizon, 4.0);
  report.key("C");
  report.value(r.C);
  report.key("verified_up_to");
  report.value(r.verified_up_to);
  report.key("holds");
  report.value(r.holds);
  report.key("minimal_C");
  report.value(r.minimal_C);
}

inline void scenario_empirical_circle(const ScenarioConfig& c, JsonWriter& report,
                                      ScenarioOutput& out) {
  systems::CirclePointRational theta(1, 7);
  std::vector<std::vector<double>> orbit;
  for (std::size_t i = 0; i < c.horizon; ++i) {
    orbit.push_back({theta.value()});
    theta = systems::circle_mult(3, theta);
  }
  avg::GridBinning binning{{0.0}, {1.0}, {7}};
  auto m = avg::empirical_measure(orbit, binning);
  std::string csv = "bin,weight\n";
  for (std::size_t i = 0; i < m.weights.size(); ++i)
    csv += std::to_string(i) + "," + format_double(m.weights[i]) + "\n";
  out.files.emplace_back("weights.csv", csv);
  report.key("bins");
  report.value(m.weights.size());
  report.key("weights");
  report.begin_array();
  for (double w : m.weights) report.value(w);
  report.end_array();
}

inline void scenario_coin_density(const ScenarioConfig& c, JsonWriter& report, ScenarioOutput&) {
  const std::uint64_t seed = c.seeds.empty() ? 1 : c.seeds.front();
  SplitMix64 rng(seed);
  symbolic::Word w(c.horizon + 8);
  for (auto& s : w) s = static_cast<std::uint8_t>(rng.next() & 1);
  auto point = symbolic::SymbolicPoint::eventually(w, 0);
  auto diag = sensitivity::cylinder_density(point, c.horizon, 8, 2);
  report.key("seed");
  report.value(seed);
  report.key("covered_fraction");
  report.value(diag.covered_fraction);
  report.key("resolution");
  report.value(diag.resolution);
  report.key("orbit_length");
  report.value(diag.orbit_length);
}

inline void scenario_markov_truncation(const ScenarioConfig& c, JsonWriter& report,
                                       ScenarioOutput&) {
  // renewal shift: everything returns to state 0, state 0 reaches everything
  auto rule = [](std::size_t i, std::size_t j) { return i == 0 || j == 0; };
  auto t = symbolic::markov_truncation(rule, c.horizon);
  report.key("level");
  report.value(c.horizon);
  report.key("states");
  report.value(t.matrix.size());
  report.key("mixing");
  report.value(t.matrix.mixing());
  report.key("mixing_exponent");
  report.value(t.matrix.mixing_exponent());
  report.key("entries");
  report.begin_array();
  for (const auto& row : t.matrix.entries()) {
    report.begin_array();
    for (auto e : row) report.value(static_cast<std::uint64_t>(e));
    report.end_array();
  }
  report.end_array();
}

}  // namespace detail

// Executes the scenario deterministically and writes averages/report/manifest
// artifacts. Identical config and seeds produce byte-identical report.json.
inline RunManifest run_scenario(ScenarioConfig config) {
  const auto t0 = std::chrono::steady_clock::now();

  if (config.scenario != "INLINE") {
    const PresetInfo* preset = find_preset(config.scenario);
    if (preset == nullptr)
      throw Error(ErrorCode::UNKNOWN_SCENARIO, "no preset named '" + config.scenario + "'");
    if (config.horizon == 0) config.horizon = preset->default_horizon;
    config.tail_fraction = config.tail_fraction == 0.25 ? preset->default_tail_fraction
                                                        : config.tail_fraction;
  }

  JsonWriter report;
  report.begin_object();
  report.key("scenario");
  report.value(config.scenario);
  report.key("config");
  report.begin_object();
  report.key("horizon");
  report.value(config.horizon);
  report.key("seeds");
  report.begin_array();
  for (auto s : config.seeds) report.value(s);
  report.end_array();
  report.key("tail_fraction");
  report.value(config.tail_fraction);
  report.key("cluster_tol");
  report.value(config.cluster_tol);
  report.key("level_tol");
  report.value(config.level_tol);
  report.end_object();

  detail::ScenarioOutput out;
  const std::string& name = config.scenario;
  if (name == "shift-blocks-geometric") {
    detail::run_block_scenario(config, symbolic::BlockSchedule::geometric(2), "birkhoff", report,
                               out);
  } else if (name == "shift-blocks-superlinear") {
    detail::run_block_scenario(config, symbolic::BlockSchedule::superlinear(), "birkhoff", report,
                               out);
  } else if (name == "INLINE") {
    auto schedule = config.schedule_rule == "geometric"
                        ? symbolic::BlockSchedule::geometric(config.ratio)
                        : symbolic::BlockSchedule::superlinear();
    detail::run_block_scenario(config, schedule, config.scheme, report, out);
  } else if (name == "cylinder-density") {
    detail::scenario_cylinder_density(config, report, out);
  } else if (name == "lambda-probe") {
    detail::scenario_lambda_probe(config, report, out);
  } else if (name == "rigidity-goldenmean") {
    detail::scenario_rigidity_goldenmean(config, report, out);
  } else if (name == "dichotomy-full-2-shift") {
    detail::scenario_dichotomy_full_shift(config, report, out);
  } else if (name == "folner-z2-fixedpoint") {
    detail::scenario_folner(config, true, report, out);
  } else if (name == "folner-z2-orbit") {
    detail::scenario_folner(config, false, report, out);
  } else if (name == "spherical-z4z6") {
    detail::scenario_spherical(config, report, out);
  } else if (name == "cesaro-preorbit") {
    detail::scenario_cesaro_preorbit(config, report, out);
  } else if (name == "psi-bound") {
    detail::scenario_psi_bound(config, report, out);
  } else if (name == "kan-intermingled") {
    detail::scenario_kan(config, report, out);
  } else if (name == "tempered-boxes") {
    detail::scenario_tempered(config, report, out);
  } else if (name == "empirical-x3-circle") {
    detail::scenario_empirical_circle(config, report, out);
  } else if (name == "coin-shift-density") {
    detail::scenario_coin_density(config, report, out);
  } else if (name == "markov-renewal-truncation") {
    detail::scenario_markov_truncation(config, report, out);
  } else {
    throw Error(ErrorCode::UNKNOWN_SCENARIO, "no preset named '" + name + "'");
  }
  report.end_object();

  std::filesystem::path dir(config.output_dir);
  std::filesystem::create_directories(dir);

  RunManifest manifest;
  manifest.scenario = config.scenario;
  manifest.version = kVersion;
  manifest.output_dir = dir;

  out.files.emplace_back("report.json", report.str() + "\n");
  for (const auto& [fname, contents] : out.files) {
    std::ofstream f(dir / fname, std::ios::binary);
    f << contents;
    manifest.artifacts.push_back({fname, fnv1a64_hex(contents)});
  }

  manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  JsonWriter mw;
  mw.begin_object();
  mw.key("scenario");
  mw.value(config.scenario);
  mw.key("version");
  mw.value(manifest.version);
  mw.key("wall_clock_seconds");
  mw.value(manifest.wall_clock_seconds);
  mw.key("config");
  mw.begin_object();
  mw.key("horizon");
  mw.value(config.horizon);
  mw.key("seeds");
  mw.begin_array();
  for (auto s : config.seeds) mw.value(s);
  mw.end_array();
  mw.key("tail_fraction");
  mw.value(config.tail_fraction);
  mw.key("cluster_tol");
  mw.value(config.cluster_tol);
  mw.key("level_tol");
  mw.value(config.level_tol);
  mw.key("output_dir");
  mw.value(config.output_dir);
  mw.end_object();
  mw.key("artifacts");
  mw.begin_array();
  for (const auto& a : manifest.artifacts) {
    mw.begin_object();
    mw.key("name");
    mw.value(a.name);
    mw.key("digest");
    mw.value(a.digest);
    mw.end_object();
  }
  mw.end_array();
  mw.end_object();
  {
    std::ofstream f(dir / "manifest.json", std::ios::binary);
    f << mw.str() << "\n";
  }
  return manifest;
}

}  // namespace historic::harness
