#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "chain_model.hpp"
#include "replicates.hpp"
#include "simulation_engine.hpp"

namespace revclt::mart {

/// theta^n(x) = (1/n) sum_{i=0}^{n-1} E(X_0 + ... + X_i | xi_0 = x)
///            = sign(x) [1/|x| - r(1 - r^n) / (n |x|^2)],  r = 1 - |x|.
/// Near x = 0 (n|x| small) the equivalent binomial series is used.
double theta_eval(std::uint64_t n, chain::ChainState s) noexcept;

/// thetabar^n(x) = theta^n(x) - sign(x).
inline double theta_bar(std::uint64_t n, chain::ChainState s) noexcept {
  return theta_eval(n, s) - chain::sign(s.x);
}

/// Pathwise forward and forward-backward martingale decompositions of one
/// trajectory at averaging horizon n. Index conventions (m = path length):
///   theta[k], S[k]              k = 0..m
///   D[k] = D_k^n, M[k], R[k]    k = 1..m   (D[0] = M[0] = R[0] = 0)
///   D_tilde[k] = D~_k^n         k = 0..m-1 (D_tilde[m] = 0)
///   M_tilde[k] = sum_{i<k} D~_i k = 0..m
///   R_bar[k]                    k = 0..m
struct DecompositionRecord {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::vector<double> theta;
  std::vector<double> D;
  std::vector<double> M;
  std::vector<double> R;
  std::vector<double> D_tilde;
  std::vector<double> M_tilde;
  std::vector<double> R_bar;
  std::vector<double> S;
  double residual_fwd = 0.0;  ///< max_k |S_k - M_k - R_k|
  double residual_fb = 0.0;   ///< max_k |S_k - (X_k - X_0 + M_k + M~_k + Rbar_k) / 2|

  /// Identity tolerance: 1e-8 * max(1, max_k |S_k|).
  double tolerance() const noexcept;
};

/// Forward pieces only (theta, D, M, R, S, residual_fwd).
DecompositionRecord decompose_forward(const sim::Trajectory& traj, std::uint64_t n);

/// Forward plus backward pieces and both residuals.
DecompositionRecord decompose_fb(const sim::Trajectory& traj, std::uint64_t n);

/// max_k |X_k + X_{k+1} - D_{k+1} - D~_k - (c_k + c_{k+1}) / n| with
/// c_k = cond_sum(xi_k, n); the per-step form of the forward-backward sum.
double pairwise_relation_residual(const sim::Trajectory& traj, const DecompositionRecord& rec);

/// `decomposition.csv` with one row per k = 0..m; undefined entries empty.
void write_decomposition_csv(const sim::Trajectory& traj, const DecompositionRecord& rec,
                             const std::filesystem::path& path);

struct MartingaleCheck {
  std::uint64_t n = 0;
  double max_conditional_mean = 0.0;  ///< over the analytic x grid
  std::vector<sim::MonteCarloEstimate> lag_products;  ///< E(D_k D_{k+j}), j = 1..3
  std::vector<double> lag_correlations;
  sim::MonteCarloEstimate d_mean;  ///< E(D_k)
};

/// Analytic E(D_{k+1} | xi_k = x) on a 1000-point grid (the nu-integral of
/// theta^n is evaluated by symmetric quadrature, not assumed zero), plus a
/// Monte Carlo check of lag-j orthogonality of D_k, D_{k+j} at k = 1.
MartingaleCheck martingale_property_check(std::uint64_t n, std::size_t reps,
                                          const sim::ReplicateOptions& opt);

}  // namespace revclt::mart
