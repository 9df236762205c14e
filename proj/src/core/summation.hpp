#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace revclt {

/// Neumaier-compensated accumulator in extended precision.
class CompensatedSum {
 public:
  void add(long double v) noexcept {
    const long double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(long double v) noexcept {
    add(v);
    return *this;
  }
  long double value() const noexcept { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

/// Pairwise (cascade) summation; the result depends only on the element
/// order, never on how the caller partitioned the work.
inline double pairwise_sum(std::span<const double> v) noexcept {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace revclt
