#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "replicates.hpp"

// Distributional checks of the invariance principle for the sign chain:
// S_n / sigma_n => N(0, 1/2) and W_n(t) = S_[nt] / sigma_n => 2^{-1/2} W(t).

namespace revclt::fclt {

/// Variance of the limit law of S_n / sigma_n.
inline constexpr double kLimitVariance = 0.5;

/// Sorted replicate values of a normalized statistic.
struct EmpiricalSample {
  std::vector<double> values;
  std::uint64_t n = 0;
  double normalization = 1.0;

  std::size_t reps() const noexcept { return values.size(); }
  /// Sorts the values.
  static EmpiricalSample from(std::vector<double> values, std::uint64_t n, double normalization);
};

struct KsResult {
  double statistic = 0.0;
  std::size_t reps = 0;
  double reference_mean = 0.0;
  double reference_variance = 1.0;
  double p_value_bound = 1.0;  ///< DKW: min(1, 2 exp(-2 reps D^2))
};

/// Standard normal CDF via erfc.
double normal_cdf(double z) noexcept;

/// One-sample KS distance against N(0, variance). Requires reps >= 10.
KsResult ks_stat(const EmpiricalSample& sample, double variance);

/// Two-sample KS distance between sorted samples.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// DKW half-width at level alpha: sqrt(ln(2 / alpha) / (2 reps)).
double dkw_epsilon(std::size_t reps, double alpha) noexcept;

/// S_n / sigma_n over `reps` regeneration-sampled replicates.
EmpiricalSample sample_normalized_sums(std::uint64_t n, std::size_t reps,
                                       const sim::ReplicateOptions& opt);

struct CltReport {
  std::uint64_t n = 0;
  KsResult ks;
  sim::MonteCarloEstimate mean;
  sim::MonteCarloEstimate second_moment;
  std::uint64_t master_seed = 0;
};

CltReport clt_test(std::uint64_t n, std::size_t reps, const sim::ReplicateOptions& opt);

/// 20 start states: the step-0.1 grid on [-1, 1] without 0.
std::vector<double> default_start_grid();

struct ConditionalCltRow {
  double x = 0.0;
  std::string function;  ///< cos1, sin1, cos2, sin2
  sim::MonteCarloEstimate estimate;
  double reference = 0.0;
  double deviation = 0.0;
};

struct ConditionalCltReport {
  std::uint64_t n = 0;
  std::size_t inner_reps = 0;
  std::uint64_t master_seed = 0;
  std::vector<ConditionalCltRow> rows;
  std::vector<double> epsilons;
  std::vector<double> fraction_exceeding;  ///< share of start states whose worst deviation > eps
};

/// Limit expectations of cos(bZ), sin(bZ) for Z ~ N(0, 1/2).
double reference_cos(double b) noexcept;

ConditionalCltReport conditional_clt_test(std::span<const double> x_grid, std::uint64_t n,
                                          std::size_t inner_reps,
                                          const sim::ReplicateOptions& opt,
                                          std::vector<double> epsilons = {0.05, 0.1});

struct FddReport {
  std::uint64_t n = 0;
  std::size_t reps = 0;
  std::uint64_t master_seed = 0;
  std::vector<double> t_grid;
  std::vector<std::uint64_t> indices;  ///< [n t]
  /// Row-major |grid| x |grid| matrices.
  std::vector<double> cov;     ///< E W(s) W(t) (the mean is 0 by symmetry)
  std::vector<double> cov_se;
  std::vector<double> oracle;  ///< exact E S_a S_b / sigma_n^2
  std::vector<double> limit;   ///< min(s, t) / 2
  /// (V(X+Y) - V(X-Y)) / 4 with V = (IQR / 1.349)^2; targets the limit
  /// covariance, insensitive to the rare long runs that inflate `cov`.
  std::vector<double> robust_cov;
  double max_limit_deviation = 0.0;
  double max_oracle_z = 0.0;  ///< max |cov - oracle| / se
  std::vector<double> increment_corr;         ///< corr(W(t_{i+1}) - W(t_i), W(t_i))
  std::vector<double> increment_corr_oracle;  ///< exact finite-n value
};

/// Gaussian-calibrated variance from the interquartile range.
double iqr_variance(std::vector<double> values);

FddReport fdd_cov_test(std::span<const double> t_grid, std::uint64_t n, std::size_t reps,
                       const sim::ReplicateOptions& opt);

struct TightnessRow {
  double delta = 0.0;
  std::uint64_t horizon = 0;  ///< [n delta]
  sim::MonteCarloEstimate probability;
  double scaled = 0.0;  ///< probability / delta
  double scaled_se = 0.0;
};

/// (1/delta) P(max_{k <= [n delta]} |S_k| > eps sigma_n) per delta.
std::vector<TightnessRow> tightness_modulus(std::span<const double> delta_grid, double eps,
                                            std::uint64_t n, std::size_t reps,
                                            const sim::ReplicateOptions& opt);

struct UiRow {
  double M = 0.0;
  std::uint64_t n = 0;
  sim::MonteCarloEstimate tail_mass;  ///< E (S_n/sigma_n)^2 1{|S_n/sigma_n| > M}
};

std::vector<UiRow> ui_diagnostic(std::span<const double> M_grid,
                                 std::span<const std::uint64_t> n_grid, std::size_t reps,
                                 const sim::ReplicateOptions& opt);

struct Key2Report {
  std::uint64_t n = 0;
  std::size_t outer_reps = 0;
  std::size_t inner_reps = 0;
  std::uint64_t master_seed = 0;
  /// pi-average of |mean_inner(S_n^2) - sigma_n^2| / sigma_n^2; biased up by
  /// inner noise.
  sim::MonteCarloEstimate raw_l1;
  /// pi-average of the inner estimator's variance, s^2 / inner / sigma_n^4.
  double noise_bias = 0.0;
  /// sqrt(max(0, E(m - sigma^2)^2 / sigma^4 - noise_bias)): L2 version with
  /// the noise term subtracted.
  double corrected_l2 = 0.0;
};

/// Nested estimate of ||E_0(S_n^2) - sigma_n^2||_1 / sigma_n^2. Diagnostic
/// grade only. Requires n <= 10^4.
Key2Report key2_estimate(std::uint64_t n, std::size_t outer_reps, std::size_t inner_reps,
                         const sim::ReplicateOptions& opt);

void write_clt_csv(const std::vector<CltReport>& reports, const std::filesystem::path& path);
void write_conditional_clt_csv(const std::vector<ConditionalCltReport>& reports,
                               const std::filesystem::path& path);
void write_fdd_csv(const FddReport& report, const std::filesystem::path& path);
void write_tightness_csv(const std::vector<TightnessRow>& rows, double eps, std::uint64_t n,
                         std::uint64_t master_seed, const std::filesystem::path& path);
void write_ui_csv(const std::vector<UiRow>& rows, const std::filesystem::path& path);
void write_key2_csv(const std::vector<Key2Report>& reports, const std::filesystem::path& path);

}  // namespace revclt::fclt
