#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "historic/errors.hpp"
#include "historic/kahan.hpp"

// Shift spaces: lazy infinite words, shift metrics, cylinder algebra,
// block-schedule constructions of oscillating points, specification-based
// shadowing on mixing SFTs, countable-Markov truncations and the
// periodic-orbit rigidity test.
namespace historic::symbolic {

using Word = std::vector<std::uint8_t>;

inline Word word_from_string(const std::string& s) {
  Word w;
  w.reserve(s.size());
  for (char c : s) {
    if (c < '0' || c > '9') throw Error(ErrorCode::PARSE_ERROR, "word symbols must be digits");
    w.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return w;
}

inline std::string word_to_string(std::span<const std::uint8_t> w) {
  std::string s;
  s.reserve(w.size());
  for (auto c : w) s.push_back(static_cast<char>('0' + c));
  return s;
}

struct Alphabet {
  std::size_t size;

  explicit Alphabet(std::size_t n) : size(n) {
    if (n < 2) throw Error(ErrorCode::DEGENERATE_TARGET, "alphabet needs at least two symbols");
  }
};

// 0/1 allowed-transition matrix with no stranded symbols. Mixing is certified
// at construction by locating the least power with all entries positive
// (bounded by the Wielandt exponent n^2 - 2n + 2).
class TransitionMatrix {
 public:
  explicit TransitionMatrix(std::vector<std::vector<std::uint8_t>> entries)
      : entries_(std::move(entries)) {
    const std::size_t n = entries_.size();
    if (n == 0) throw Error(ErrorCode::EMPTY_TRUNCATION, "empty transition matrix");
    for (const auto& row : entries_)
      if (row.size() != n) throw Error(ErrorCode::PARSE_ERROR, "transition matrix must be square");
    for (std::size_t i = 0; i < n; ++i) {
      bool row_ok = false, col_ok = false;
      for (std::size_t j = 0; j < n; ++j) {
        row_ok |= entries_[i][j] != 0;
        col_ok |= entries_[j][i] != 0;
      }
      if (!row_ok || !col_ok)
        throw Error(ErrorCode::EMPTY_TRUNCATION, "stranded symbol in transition matrix");
    }
    certify_mixing();
  }

  static TransitionMatrix full_shift(std::size_t n_symbols) {
    return TransitionMatrix(std::vector<std::vector<std::uint8_t>>(
        n_symbols, std::vector<std::uint8_t>(n_symbols, 1)));
  }

  // Golden-mean shift: the word "11" is forbidden.
  static TransitionMatrix golden_mean() {
    return TransitionMatrix({{1, 1}, {1, 0}});
  }

  std::size_t size() const { return entries_.size(); }
  bool allowed(std::uint8_t from, std::uint8_t to) const { return entries_[from][to] != 0; }
  const std::vector<std::vector<std::uint8_t>>& entries() const { return entries_; }

  bool mixing() const { return mixing_; }
  std::size_t mixing_exponent() const { return mixing_exponent_; }

  bool admissible(std::span<const std::uint8_t> w) const {
    for (auto c : w)
      if (c >= size()) return false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (!allowed(w[i], w[i + 1])) return false;
    return true;
  }

 private:
  void certify_mixing() {
    const std::size_t n = size();
    const std::size_t wielandt = n * n - 2 * n + 2;
    std::vector<std::vector<std::uint8_t>> pow = entries_;
    for (std::size_t p = 1; p <= wielandt; ++p) {
      bool positive = true;
      for (const auto& row : pow)
        for (auto e : row) positive &= (e != 0);
      if (positive) {
        mixing_ = true;
        mixing_exponent_ = p;
        return;
      }
      // boolean matrix product pow <- pow * entries_
      std::vector<std::vector<std::uint8_t>> next(n, std::vector<std::uint8_t>(n, 0));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
          if (pow[i][k])
            for (std::size_t j = 0; j < n; ++j) next[i][j] |= entries_[k][j];
      pow = std::move(next);
    }
    mixing_ = false;
    mixing_exponent_ = 0;
  }

  std::vector<std::vector<std::uint8_t>> entries_;
  bool mixing_ = false;
  std::size_t mixing_exponent_ = 0;
};

enum class LengthRule { GEOMETRIC, SUPERLINEAR };

// Run-length law for oscillating block points. GEOMETRIC(r): l_i = r^(i-1).
// SUPERLINEAR: l_1 = 1, l_{i+1} = i * (l_1 + ... + l_i), so the cumulative
// length after block i equals i!.
struct BlockSchedule {
  double low_symbol_value = 0.0;   // target of the 0-run average valleys
  double high_symbol_value = 1.0;  // target of the 1-run average peaks
  LengthRule rule = LengthRule::GEOMETRIC;
  std::uint64_t ratio = 2;  // used by GEOMETRIC only

  static BlockSchedule geometric(std::uint64_t ratio = 2) {
    if (ratio < 2) throw Error(ErrorCode::DEGENERATE_TARGET, "geometric ratio must be >= 2");
    BlockSchedule s;
    s.rule = LengthRule::GEOMETRIC;
    s.ratio = ratio;
    return s;
  }

  static BlockSchedule superlinear() {
    BlockSchedule s;
    s.rule = LengthRule::SUPERLINEAR;
    return s;
  }

  // Length of block i (1-based); saturates at the uint64 maximum.
  std::uint64_t length(std::size_t i) const {
    const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
    if (rule == LengthRule::GEOMETRIC) {
      std::uint64_t l = 1;
      for (std::size_t j = 1; j < i; ++j) {
        if (l > cap / ratio) return cap;
        l *= ratio;
      }
      return l;
    }
    if (i == 1) return 1;
    std::uint64_t total = 1;  // l_1
    std::uint64_t l = 1;
    for (std::size_t j = 1; j + 1 < i; ++j) {
      if (total > cap / j) return cap;
      l = static_cast<std::uint64_t>(j) * total;
      if (total > cap - l) return cap;
      total += l;
    }
    if (total > cap / (i - 1)) return cap;
    return static_cast<std::uint64_t>(i - 1) * total;
  }
};

// Lazily generated infinite word: a finite prefix plus a total rule for the
// tail. Symbols are cached up to the largest index materialized.
class SymbolicPoint {
 public:
  static SymbolicPoint periodic(Word cycle) {
    if (cycle.empty()) throw Error(ErrorCode::DOMAIN_EMPTY, "empty period word");
    SymbolicPoint p;
    p.extend_ = [cycle](Word& cache, std::size_t n) {
      while (cache.size() < n) cache.push_back(cycle[cache.size() % cycle.size()]);
    };
    return p;
  }

  static SymbolicPoint eventually(Word head, std::uint8_t tail_symbol) {
    SymbolicPoint p;
    p.extend_ = [head, tail_symbol](Word& cache, std::size_t n) {
      while (cache.size() < n)
        cache.push_back(cache.size() < head.size() ? head[cache.size()] : tail_symbol);
    };
    return p;
  }

  // Prefix followed by alternating runs of symbols 0 and 1 with lengths from
  // the schedule (block 1 is a 0-run).
  static SymbolicPoint block_schedule(Word prefix, BlockSchedule schedule) {
    SymbolicPoint p;
    p.extend_ = [prefix, schedule](Word& cache, std::size_t n) {
      if (cache.size() >= n) return;
      cache.clear();
      cache.reserve(n);
      cache.insert(cache.end(), prefix.begin(),
                   prefix.begin() + static_cast<std::ptrdiff_t>(std::min(prefix.size(), n)));
      std::size_t block = 1;
      while (cache.size() < n) {
        const std::uint8_t sym = (block % 2 == 0) ? 1 : 0;
        std::uint64_t len = schedule.length(block);
        while (len-- > 0 && cache.size() < n) cache.push_back(sym);
        ++block;
      }
    };
    return p;
  }

  std::uint8_t symbol(std::size_t i) const {
    if (i >= cache_.size()) extend_(cache_, i + 1);
    return cache_[i];
  }

  // First n symbols; materializes the cache as needed.
  std::span<const std::uint8_t> prefix(std::size_t n) const {
    if (cache_.size() < n) extend_(cache_, n);
    return {cache_.data(), n};
  }

 private:
  SymbolicPoint() = default;

  mutable Word cache_;
  std::function<void(Word&, std::size_t)> extend_;
};

struct Cylinder {
  Word word;

  std::size_t depth() const { return word.size(); }
};

// Truncated series sum_{n=1..depth} |x_n - y_n| / 2^n; the truncation error
// of the full metric is at most (size - 1) * 2^(-depth).
inline double shift_metric_sum(const SymbolicPoint& x, const SymbolicPoint& y, std::size_t depth) {
  if (depth < 1) throw Error(ErrorCode::BAD_WINDOW, "depth must be >= 1");
  KahanSum acc;
  double scale = 0.5;
  for (std::size_t i = 0; i < depth; ++i) {
    acc.add(std::abs(static_cast<double>(x.symbol(i)) - static_cast<double>(y.symbol(i))) * scale);
    scale *= 0.5;
  }
  return acc.value();
}

// Mismatch-depth metric 2^(-min{k : x_k != y_k}) with 1-based k, truncated at
// the stated depth; 0 when the words agree on all compared coordinates.
inline double mismatch_metric(const SymbolicPoint& x, const SymbolicPoint& y, std::size_t depth) {
  for (std::size_t i = 0; i < depth; ++i)
    if (x.symbol(i) != y.symbol(i)) return std::pow(2.0, -static_cast<double>(i + 1));
  return 0.0;
}

inline SymbolicPoint build_oscillating_point(const BlockSchedule& schedule,
                                             const Alphabet& alphabet) {
  if (alphabet.size < 2)
    throw Error(ErrorCode::DEGENERATE_TARGET, "oscillation needs two symbols");
  if (schedule.low_symbol_value == schedule.high_symbol_value)
    throw Error(ErrorCode::DEGENERATE_TARGET, "schedule targets coincide");
  return SymbolicPoint::block_schedule({}, schedule);
}

namespace detail {

// Lexicographically smallest shortest connector word w such that
// from -> w_1 -> ... -> w_k -> to is admissible (k may be 0).
inline Word smallest_connector(const TransitionMatrix& sft, std::uint8_t from, std::uint8_t to) {
  const std::size_t n = sft.size();
  // dist[s] = least number of edges from s to `to`.
  std::vector<std::size_t> dist(n, std::numeric_limits<std::size_t>::max());
  dist[to] = 0;
  std::vector<std::uint8_t> frontier{to};
  std::size_t d = 0;
  while (!frontier.empty()) {
    std::vector<std::uint8_t> next;
    ++d;
    for (std::size_t s = 0; s < n; ++s) {
      if (dist[s] != std::numeric_limits<std::size_t>::max()) continue;
      for (auto f : frontier)
        if (sft.allowed(static_cast<std::uint8_t>(s), f)) {
          dist[s] = d;
          next.push_back(static_cast<std::uint8_t>(s));
          break;
        }
    }
    frontier = std::move(next);
  }
  // Least edges from `from`, through its allowed successors.
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::size_t s = 0; s < n; ++s)
    if (sft.allowed(from, static_cast<std::uint8_t>(s)) &&
        dist[s] != std::numeric_limits<std::size_t>::max())
      best = std::min(best, dist[s] + 1);
  if (best == std::numeric_limits<std::size_t>::max())
    throw Error(ErrorCode::NOT_MIXING, "no path between segment endpoints");
  Word connector;
  std::uint8_t cur = from;
  std::size_t remaining = best;
  while (remaining > 1) {
    for (std::size_t s = 0; s < n; ++s) {
      if (sft.allowed(cur, static_cast<std::uint8_t>(s)) && dist[s] == remaining - 1) {
        connector.push_back(static_cast<std::uint8_t>(s));
        cur = static_cast<std::uint8_t>(s);
        break;
      }
    }
    --remaining;
  }
  return connector;
}

}  // namespace detail

// Joins the segments, in order, into one admissible word, inserting the
// lexicographically smallest shortest connector (length <= mixing exponent)
// between consecutive segments.
inline Word sft_specification_shadow(std::span<const Word> segments, const TransitionMatrix& sft) {
  if (!sft.mixing()) throw Error(ErrorCode::NOT_MIXING, "transition matrix is not mixing");
  for (const auto& seg : segments) {
    if (seg.empty()) throw Error(ErrorCode::BAD_SEGMENT, "empty segment");
    if (!sft.admissible(seg))
      throw Error(ErrorCode::BAD_SEGMENT, "segment not admissible: " + word_to_string(seg));
  }
  Word out;
  for (const auto& seg : segments) {
    if (!out.empty()) {
      Word c = detail::smallest_connector(sft, out.back(), seg.front());
      out.insert(out.end(), c.begin(), c.end());
    }
    out.insert(out.end(), seg.begin(), seg.end());
  }
  return out;
}

// Observable on a shift space depending on coordinates 0..window-1 only.
struct SymbolObservable {
  std::size_t window = 1;
  std::function<double(std::span<const std::uint8_t>)> f;

  double operator()(std::span<const std::uint8_t> w) const { return f(w.first(window)); }
};

inline SymbolObservable first_symbol_observable() {
  return {1, [](std::span<const std::uint8_t> w) { return static_cast<double>(w[0]); }};
}

// Values of the observable along the first `horizon` shifts of the point.
inline std::vector<double> observable_trace(const SymbolicPoint& p, const SymbolObservable& obs,
                                            std::size_t horizon) {
  auto symbols = p.prefix(horizon + obs.window - 1);
  std::vector<double> out(horizon);
  for (std::size_t j = 0; j < horizon; ++j) out[j] = obs(symbols.subspan(j));
  return out;
}

// In-cylinder point with the oscillating tail: cylinder word, then the
// smallest admissible connector into the 0-run start, then the block word.
// The finite prefix leaves the tail oscillation unchanged.
inline SymbolicPoint cylinder_irregular_witness(const Cylinder& cyl, const BlockSchedule& schedule,
                                                const TransitionMatrix& sft) {
  if (!sft.admissible(cyl.word))
    throw Error(ErrorCode::BAD_CYLINDER, "cylinder word not admissible");
  // The oscillating tail lives on runs of 0s and 1s.
  if (!(sft.allowed(0, 0) && sft.allowed(0, 1) && sft.allowed(1, 0) && sft.allowed(1, 1)))
    throw Error(ErrorCode::BAD_SEGMENT, "block word not admissible in this SFT");
  Word prefix = cyl.word;
  if (!prefix.empty()) {
    Word c = detail::smallest_connector(sft, prefix.back(), 0);
    prefix.insert(prefix.end(), c.begin(), c.end());
  }
  return SymbolicPoint::block_schedule(std::move(prefix), schedule);
}

namespace detail {

inline bool is_primitive(std::span<const std::uint8_t> w) {
  const std::size_t p = w.size();
  for (std::size_t d = 1; d < p; ++d) {
    if (p % d != 0) continue;
    bool power = true;
    for (std::size_t i = d; i < p && power; ++i) power = (w[i] == w[i % d]);
    if (power) return false;
  }
  return true;
}

inline bool is_canonical_rotation(std::span<const std::uint8_t> w) {
  const std::size_t p = w.size();
  for (std::size_t r = 1; r < p; ++r) {
    for (std::size_t i = 0; i < p; ++i) {
      const std::uint8_t a = w[(i + r) % p];
      if (a != w[i]) {
        if (a < w[i]) return false;
        break;
      }
    }
  }
  return true;
}

}  // namespace detail

// Exact average of the observable over the pi(p) shifts of the periodic point.
inline double periodic_average(const Word& orbit_word, const SymbolObservable& obs,
                               const TransitionMatrix& sft) {
  if (orbit_word.empty()) throw Error(ErrorCode::BAD_CYCLE, "empty cycle");
  if (!sft.admissible(orbit_word) || !sft.allowed(orbit_word.back(), orbit_word.front()))
    throw Error(ErrorCode::BAD_CYCLE, "cycle not admissible: " + word_to_string(orbit_word));
  if (!detail::is_primitive(orbit_word))
    throw Error(ErrorCode::BAD_CYCLE, "cycle is a power of a shorter word");
  const std::size_t p = orbit_word.size();
  Word doubled(orbit_word);
  while (doubled.size() < p + obs.window) doubled.insert(doubled.end(), orbit_word.begin(), orbit_word.end());
  KahanSum acc;
  for (std::size_t j = 0; j < p; ++j) acc.add(obs(std::span(doubled).subspan(j)));
  return acc.value() / static_cast<double>(p);
}

// All primitive cycles (one representative per rotation class) of period
// <= max_period, lexicographically smallest rotation first.
inline std::vector<Word> enumerate_primitive_cycles(const TransitionMatrix& sft,
                                                    std::size_t max_period) {
  std::vector<Word> cycles;
  Word w;
  std::function<void(std::size_t)> dfs = [&](std::size_t target) {
    if (w.size() == target) {
      if (sft.allowed(w.back(), w.front()) && detail::is_primitive(w) &&
          detail::is_canonical_rotation(w))
        cycles.push_back(w);
      return;
    }
    for (std::size_t s = 0; s < sft.size(); ++s) {
      if (!w.empty() && !sft.allowed(w.back(), static_cast<std::uint8_t>(s))) continue;
      w.push_back(static_cast<std::uint8_t>(s));
      dfs(target);
      w.pop_back();
    }
  };
  for (std::size_t p = 1; p <= max_period; ++p) dfs(p);
  return cycles;
}

enum class RigidityVerdict { RIGID, NON_RIGID };

struct RigidityResult {
  RigidityVerdict verdict = RigidityVerdict::RIGID;
  double tolerance = 0.0;
  // RIGID: the common average value.
  double c_phi = 0.0;
  // NON_RIGID: extremal pair of periodic orbits and their averages.
  Word witness_low, witness_high;
  double average_low = 0.0, average_high = 0.0;
};

// Either every periodic average up to max_period agrees within tol (RIGID,
// with c_phi their mean) or the extremal pair witnesses the failure.
inline RigidityResult rigidity_test(const TransitionMatrix& sft, const SymbolObservable& obs,
                                    std::size_t max_period, double tol) {
  if (max_period < 1) throw Error(ErrorCode::BAD_WINDOW, "max_period must be >= 1");
  auto cycles = enumerate_primitive_cycles(sft, max_period);
  if (cycles.empty()) throw Error(ErrorCode::NO_CYCLES, "no primitive cycles found");
  RigidityResult r;
  r.tolerance = tol;
  std::size_t lo = 0, hi = 0;
  std::vector<double> avgs(cycles.size());
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    avgs[i] = periodic_average(cycles[i], obs, sft);
    if (avgs[i] < avgs[lo]) lo = i;
    if (avgs[i] > avgs[hi]) hi = i;
  }
  if (avgs[hi] - avgs[lo] <= tol) {
    r.verdict = RigidityVerdict::RIGID;
    r.c_phi = shifted_mean(avgs);
  } else {
    r.verdict = RigidityVerdict::NON_RIGID;
    r.witness_low = cycles[lo];
    r.witness_high = cycles[hi];
    r.average_low = avgs[lo];
    r.average_high = avgs[hi];
  }
  return r;
}

// Finite truncation of a countable adjacency rule to states 0..level-1, with
// stranded states pruned until every survivor has in- and out-degree >= 1.
// Returns the matrix over the surviving states plus their original indices.
struct Truncation {
  TransitionMatrix matrix;
  std::vector<std::size_t> kept_states;
};

inline Truncation markov_truncation(
    const std::function<bool(std::size_t, std::size_t)>& adjacency_rule, std::size_t level) {
  if (level < 2) throw Error(ErrorCode::BAD_WINDOW, "truncation level must be >= 2");
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < level; ++i) kept.push_back(i);
  bool changed = true;
  while (changed && !kept.empty()) {
    changed = false;
    std::vector<std::size_t> next;
    for (std::size_t i : kept) {
      bool out_deg = false, in_deg = false;
      for (std::size_t j : kept) {
        out_deg |= adjacency_rule(i, j);
        in_deg |= adjacency_rule(j, i);
      }
      if (out_deg && in_deg) next.push_back(i);
      else changed = true;
    }
    kept = std::move(next);
  }
  if (kept.empty()) throw Error(ErrorCode::EMPTY_TRUNCATION, "no states survive pruning");
  const std::size_t n = kept.size();
  std::vector<std::vector<std::uint8_t>> entries(n, std::vector<std::uint8_t>(n, 0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      entries[a][b] = adjacency_rule(kept[a], kept[b]) ? 1 : 0;
  return Truncation{TransitionMatrix(std::move(entries)), std::move(kept)};
}

}  // namespace historic::symbolic
