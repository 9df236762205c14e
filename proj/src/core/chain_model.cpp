#include "chain_model.hpp"

namespace revclt::chain {

double q_power_f(ChainState s, std::uint64_t k) noexcept {
  if (k == 0) return sign(s.x);
  return std::pow(1.0 - s.magnitude(), static_cast<double>(k)) * sign(s.x);
}

double geometric_tail_sum(double a, std::uint64_t n) noexcept {
  const double nd = static_cast<double>(n);
  if (nd * a > kSeriesSwitch) {
    // r (1 - r^n) / (1 - r) with r = 1 - a; 1 - r^n via expm1/log1p.
    const double one_minus_rn = -std::expm1(nd * std::log1p(-a));
    return (1.0 - a) * one_minus_rn / a;
  }
  // sum_j (1 - a)^j = n + sum_{k>=1} (-a)^k C(n + 1, k + 1).
  double sum = nd;
  double term = -a * nd * (nd + 1.0) / 2.0;
  for (std::uint64_t k = 1; k <= n && term != 0.0; ++k) {
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    term *= -a * static_cast<double>(n - k) / static_cast<double>(k + 2);
  }
  return sum;
}

}  // namespace revclt::chain
