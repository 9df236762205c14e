#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "replicates.hpp"

// Two-sided Monte Carlo checks of the reversible-chain maximal inequalities
//
//   || max_i |S_i| ||_p <= || max_i |X_i| ||_p + (4q + 3) max_i ||S_i||_p
//   P(max_i |S_i| > x) <= (2/x) [18 E|S_n| 1{|S_n| > x/12}
//                               + 55 max_i ||E_0(S_i)||_1 + || max_i |X_i| ||_1]
//
// with 1/p + 1/q = 1. Since |X_i| = 1 almost surely, both max|X_i| norms are
// exactly 1.

namespace revclt::ineq {

enum class Verdict { pass, fail, inconclusive };

const char* to_string(Verdict v) noexcept;

struct InequalityReport {
  std::string kind;  ///< "lp" or "tail"
  double p_or_x = 0.0;
  std::uint64_t n = 0;
  sim::MonteCarloEstimate lhs;
  sim::MonteCarloEstimate rhs;
  double margin = 0.0;  ///< rhs.mean - lhs.mean
  bool vacuous = false;  ///< tail bound exceeds 1
  Verdict verdict = Verdict::inconclusive;
  std::uint64_t master_seed = 0;
  std::string note;
};

/// pass iff lhs.ci_high <= rhs.ci_low; fail iff lhs.ci_low > rhs.ci_high;
/// anything else is inconclusive.
Verdict decide(const sim::MonteCarloEstimate& lhs, const sim::MonteCarloEstimate& rhs) noexcept;

/// Dyadic grid {1, 2, 4, ...} with n appended when n is not a power of two.
std::vector<std::uint64_t> dyadic_grid(std::uint64_t n);

/// L_p maximal inequality. For p = 2 the right-hand max_i ||S_i||_2 is the
/// exact sigma_n (sigma_i increases in i); otherwise it is estimated on the
/// dyadic grid.
InequalityReport check_lp(double p, std::uint64_t n, std::size_t reps,
                          const sim::ReplicateOptions& opt);

/// Tail inequality; the E_0 term uses the exact H_{n+1} - 1 (increasing in i).
InequalityReport check_tail(double x, std::uint64_t n, std::size_t reps,
                            const sim::ReplicateOptions& opt);

/// `inequality_report.csv`.
void write_inequality_csv(const std::vector<InequalityReport>& reports,
                          const std::filesystem::path& path);

}  // namespace revclt::ineq
