#pragma once

#include <cmath>
#include <cstdint>

#include "rng.hpp"

// The reversible Metropolis-Hastings chain on [-1, 1] with kernel
//   Q(x, .) = (1 - |x|) delta_x + |x| nu,   nu(dx) = |x| dx,
// whose invariant law is uniform on [-1, 1]. For odd g, Q^k g(x) =
// (1 - |x|)^k g(x), which makes every conditional expectation of the
// sign functional available in closed form.

namespace revclt::chain {

/// A point of the state space [-1, 1].
struct ChainState {
  double x = 0.0;

  constexpr double magnitude() const noexcept { return x < 0.0 ? -x : x; }
  constexpr bool valid() const noexcept { return x >= -1.0 && x <= 1.0; }
  friend constexpr bool operator==(ChainState, ChainState) = default;
};

/// sign with sign(0) = 0, so the functional is exactly odd.
constexpr double sign(double x) noexcept {
  return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

/// The shipped odd functional X_i = sign(xi_i).
struct SignFunctional {
  constexpr double operator()(double x) const noexcept { return sign(x); }
};

/// Below this value of n|x| the geometric closed forms are replaced by their
/// binomial series in |x|, which have no cancellation near x = 0.
inline constexpr double kSeriesSwitch = 0.5;

/// Inverse CDF of nu, mapping u in [0, 1) to a point with density |x|.
inline ChainState nu_from_uniform(double u) noexcept {
  return u < 0.5 ? ChainState{-std::sqrt(1.0 - 2.0 * u)}
                 : ChainState{std::sqrt(2.0 * u - 1.0)};
}

inline ChainState sample_nu(RngStream& rng) noexcept {
  return nu_from_uniform(rng.uniform());
}

/// Draw from the invariant law pi(dx) = dx / 2.
inline ChainState sample_stationary(RngStream& rng) noexcept {
  return ChainState{2.0 * rng.uniform() - 1.0};
}

/// One transition: stay with probability 1 - |x|, else a fresh nu draw.
inline ChainState step(ChainState s, RngStream& rng) noexcept {
  return rng.uniform() < s.magnitude() ? sample_nu(rng) : s;
}

/// E(f(xi_k) | xi_0 = x) = (1 - |x|)^k sign(x).
double q_power_f(ChainState s, std::uint64_t k) noexcept;

/// sum_{j=1}^n (1 - a)^j for a in [0, 1].
double geometric_tail_sum(double a, std::uint64_t n) noexcept;

/// E(S_{k+n} - S_k | xi_k = x) = sign(x) sum_{j=1}^n (1 - |x|)^j.
inline double cond_sum(ChainState s, std::uint64_t n) noexcept {
  return sign(s.x) * geometric_tail_sum(s.magnitude(), n);
}

/// (Q g)(x) for an odd rule g. The nu-integral of an odd g vanishes, so only
/// the holding term survives.
template <class OddRule>
double apply_q_odd(OddRule&& g, ChainState s) {
  return (1.0 - s.magnitude()) * g(s.x);
}

}  // namespace revclt::chain
