#pragma once

#include <cstdint>

namespace historic {

// SplitMix64 (Steele, Lea, Flood; the java.util.SplittableRandom finalizer).
// Chosen as the experiment RNG because the reference algorithm is a dozen
// lines and every implementation agrees bit for bit.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n) by rejection-free multiply-shift; n > 0.
  std::uint64_t next_below(std::uint64_t n) {
    // 128-bit multiply keeps the distribution bias below 2^-64.
    unsigned __int128 m =
        static_cast<unsigned __int128>(next()) * static_cast<unsigned __int128>(n);
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace historic
