#pragma once

#include <cstdint>
#include <span>
#include <vector>

// Exact finite-n quantities of the sign functional of the holding chain.
// These are the deterministic reference values every Monte Carlo estimate
// is checked against.

namespace revclt::exact {

/// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286060651209;

/// E(X_0 X_m) = 1 / (m + 1).
double covariance(std::uint64_t m);

/// Harmonic number H_n. Direct compensated sum up to 10^6 terms, the
/// asymptotic expansion beyond.
double harmonic(std::uint64_t n);

/// sigma_n^2 = E S_n^2 = n + 2 sum_{m=1}^{n-1} (n - m) / (m + 1).
/// Throws std::invalid_argument for n == 0.
double sigma2(std::uint64_t n);

struct CondNorms {
  double l1;     ///< ||E_0(S_n)||_1 = H_{n+1} - 1
  double l2_sq;  ///< ||E_0(S_n)||_2^2 = sum_{j,k=1}^n 1 / (j + k + 1)
};

CondNorms cond_norms(std::uint64_t n);

/// Law of the regeneration cycle length tau_1.
struct RegenLaw {
  std::uint64_t y;
  double tail;  ///< P(tau_1 > y)
  double pmf;   ///< P(tau_1 = y)
  double H;     ///< E(tau_1^2 1{tau_1 <= y})
};

/// P(tau_1 > y) = 2 / ((y + 1)(y + 2)), valid for y >= 0.
double regen_tail(std::uint64_t y);

/// Throws std::invalid_argument for y == 0.
RegenLaw regen_law(std::uint64_t y);

struct Normalizer {
  double b;      ///< root of b^2 = n H(floor(b))
  double proxy;  ///< sqrt(2 n ln n)
};

/// Solves b^2 = n H(floor(b)) by bisection on [1, n]. Requires n >= 2.
Normalizer solve_bn(std::uint64_t n);

struct VarianceProfile {
  std::vector<std::uint64_t> n_grid;
  std::vector<double> sigma2;
  std::vector<double> ratio;  ///< sigma_n^2 / (2 n ln n); NaN at n = 1
  std::vector<double> cond_l1;
  std::vector<double> cond_l2_sq;
  std::vector<double> cond_ratio;  ///< cond_l2_sq / sigma2
};

/// Requires a non-empty, strictly increasing grid of positive integers.
VarianceProfile variance_profile(std::span<const std::uint64_t> n_grid);

/// E(S_a S_b) for a, b >= 0, from stationarity:
/// (sigma_a^2 + sigma_b^2 - sigma_{|b-a|}^2) / 2, with sigma_0^2 = 0.
double cross_moment(std::uint64_t a, std::uint64_t b);

}  // namespace revclt::exact
