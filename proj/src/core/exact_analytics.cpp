#include "exact_analytics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "summation.hpp"

namespace revclt::exact {

namespace {

constexpr std::uint64_t kDirectHarmonicLimit = 1'000'000;

double sigma2_or_zero(std::uint64_t n) { return n == 0 ? 0.0 : sigma2(n); }

}  // namespace

double covariance(std::uint64_t m) { return 1.0 / (static_cast<double>(m) + 1.0); }

double harmonic(std::uint64_t n) {
  if (n <= kDirectHarmonicLimit) {
    CompensatedSum s;
    for (std::uint64_t k = n; k >= 1; --k) s += 1.0L / static_cast<long double>(k);
    return static_cast<double>(s.value());
  }
  const long double x = static_cast<long double>(n);
  const long double inv2 = 1.0L / (x * x);
  return static_cast<double>(std::log(x) + kEulerGamma + 0.5L / x - inv2 / 12.0L +
                             inv2 * inv2 / 120.0L);
}

double sigma2(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("sigma2: n must be positive");
  const long double nl = static_cast<long double>(n);
  CompensatedSum s;
  for (std::uint64_t m = n - 1; m >= 1; --m)
    s += (nl - static_cast<long double>(m)) / (static_cast<long double>(m) + 1.0L);
  return static_cast<double>(nl + 2.0L * s.value());
}

CondNorms cond_norms(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("cond_norms: n must be positive");
  // Group sum_{j,k} 1/(j+k+1) by anti-diagonal s = j + k, which holds
  // min(s - 1, 2n - s + 1) pairs.
  CompensatedSum l2;
  for (std::uint64_t s = 2 * n; s >= 2; --s) {
    const std::uint64_t count = s <= n + 1 ? s - 1 : 2 * n - s + 1;
    l2 += static_cast<long double>(count) / static_cast<long double>(s + 1);
  }
  return {harmonic(n + 1) - 1.0, static_cast<double>(l2.value())};
}

double regen_tail(std::uint64_t y) {
  const double yd = static_cast<double>(y);
  return 2.0 / ((yd + 1.0) * (yd + 2.0));
}

RegenLaw regen_law(std::uint64_t y) {
  if (y == 0) throw std::invalid_argument("regen_law: y must be positive");
  const double yd = static_cast<double>(y);
  // sum_{j<=y} 4j / ((j+1)(j+2)) telescopes to 4 (H_{y+1} + 2/(y+2) - 2).
  const double H = 4.0 * ((harmonic(y + 1) - 2.0) + 2.0 / (yd + 2.0));
  return {y, regen_tail(y), 4.0 / (yd * (yd + 1.0) * (yd + 2.0)), H};
}

Normalizer solve_bn(std::uint64_t n) {
  if (n < 2) throw std::invalid_argument("solve_bn: n must be at least 2");
  const double nd = static_cast<double>(n);
  auto gap = [&](double b) {
    return b * b - nd * regen_law(static_cast<std::uint64_t>(std::floor(b))).H;
  };
  double lo = 1.0;
  double hi = nd;
  if (!(gap(lo) < 0.0 && gap(hi) > 0.0))
    throw std::logic_error("solve_bn: no sign change on [1, n] for n = " + std::to_string(n));
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  return {0.5 * (lo + hi), std::sqrt(2.0 * nd * std::log(nd))};
}

VarianceProfile variance_profile(std::span<const std::uint64_t> n_grid) {
  if (n_grid.empty()) throw std::invalid_argument("variance_profile: empty grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] == 0 || (i > 0 && n_grid[i] <= n_grid[i - 1]))
      throw std::invalid_argument("variance_profile: grid must be positive and strictly increasing");
  }
  VarianceProfile p;
  for (std::uint64_t n : n_grid) {
    const double nd = static_cast<double>(n);
    const double s2 = sigma2(n);
    const CondNorms c = cond_norms(n);
    p.n_grid.push_back(n);
    p.sigma2.push_back(s2);
    p.ratio.push_back(n > 1 ? s2 / (2.0 * nd * std::log(nd)) : std::nan(""));
    p.cond_l1.push_back(c.l1);
    p.cond_l2_sq.push_back(c.l2_sq);
    p.cond_ratio.push_back(c.l2_sq / s2);
  }
  return p;
}

double cross_moment(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t d = a > b ? a - b : b - a;
  return 0.5 * (sigma2_or_zero(a) + sigma2_or_zero(b) - sigma2_or_zero(d));
}

}  // namespace revclt::exact
