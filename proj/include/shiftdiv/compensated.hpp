#pragma once

#include <cmath>

namespace shiftdiv {

/// Neumaier's variant of Kahan summation. The running error is kept
/// separately so partial sums can be folded together in a fixed order.
class CompensatedSum {
 public:
  constexpr CompensatedSum() = default;
  constexpr CompensatedSum(double sum, double compensation) : sum_(sum), comp_(compensation) {}

  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  /// Fold another partial (its sum and its compensation, in that order).
  void merge(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.comp_);
  }

  CompensatedSum& operator+=(double v) noexcept {
    add(v);
    return *this;
  }

  double value() const noexcept { return sum_ + comp_; }
  double sum() const noexcept { return sum_; }
  double compensation() const noexcept { return comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace shiftdiv
