#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace historic {

// Neumaier variant of compensated summation. Long horizons (2^20 and beyond)
// must not lose the ~1e-3 average gaps being measured.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

  void reset() {
    sum_ = 0.0;
    comp_ = 0.0;
  }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double kahan_sum(std::span<const double> xs) {
  KahanSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

// Mean via compensated summation of deviations from the first element.
// A constant input yields the constant exactly.
inline double shifted_mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  const double ref = xs.front();
  KahanSum acc;
  for (double x : xs) acc.add(x - ref);
  return ref + acc.value() / static_cast<double>(xs.size());
}

}  // namespace historic
