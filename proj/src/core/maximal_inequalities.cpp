#include "maximal_inequalities.hpp"

#include <cmath>
#include <stdexcept>

#include "csv.hpp"
#include "exact_analytics.hpp"
#include "simulation_engine.hpp"

namespace revclt::ineq {

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict decide(const sim::MonteCarloEstimate& lhs, const sim::MonteCarloEstimate& rhs) noexcept {
  if (lhs.ci_high <= rhs.ci_low) return Verdict::pass;
  if (lhs.ci_low > rhs.ci_high) return Verdict::fail;
  return Verdict::inconclusive;
}

std::vector<std::uint64_t> dyadic_grid(std::uint64_t n) {
  std::vector<std::uint64_t> g;
  for (std::uint64_t i = 1; i <= n; i *= 2) {
    g.push_back(i);
    if (i > n / 2) break;
  }
  if (g.back() != n) g.push_back(n);
  return g;
}

namespace {

// (E Z)^{1/p} from an estimate of E Z, with the delta-method error.
sim::MonteCarloEstimate pth_root(const sim::MonteCarloEstimate& e, double p) {
  const double mean = std::pow(e.mean, 1.0 / p);
  const double se = e.mean > 0.0 ? mean / (p * e.mean) * e.std_error : 0.0;
  return sim::make_estimate(mean, se, e.reps, e.master_seed);
}

void finish(InequalityReport& r) {
  r.margin = r.rhs.mean - r.lhs.mean;
  r.verdict = decide(r.lhs, r.rhs);
}

}  // namespace

InequalityReport check_lp(double p, std::uint64_t n, std::size_t reps,
                          const sim::ReplicateOptions& opt) {
  if (!(p > 1.0)) throw std::invalid_argument("check_lp: p must exceed 1");
  if (n == 0) throw std::invalid_argument("check_lp: n must be positive");
  const double q = p / (p - 1.0);
  const bool exact_rhs = p == 2.0;
  const auto grid = dyadic_grid(n);

  // Column 0: max_i |S_i|^p. Columns 1..: |S_i|^p on the dyadic grid.
  const std::size_t width = exact_rhs ? 1 : 1 + grid.size();
  const auto sample = sim::run_replicates(reps, width, opt, [&](RngStream& rng, auto row) {
    const auto path = sim::simulate_regen_path(n, grid, rng);
    row[0] = std::pow(path.running_max.back(), p);
    if (!exact_rhs)
      for (std::size_t j = 0; j < grid.size(); ++j) row[1 + j] = std::pow(std::abs(path.sums[j]), p);
  });

  InequalityReport r;
  r.kind = "lp";
  r.p_or_x = p;
  r.n = n;
  r.master_seed = opt.master_seed;
  r.lhs = pth_root(sim::estimate(sample.column(0), opt.master_seed), p);

  sim::MonteCarloEstimate norm;
  if (exact_rhs) {
    norm = sim::make_estimate(std::sqrt(exact::sigma2(n)), 0.0, reps, opt.master_seed);
    r.note = "max_i ||S_i||_2 = sigma_n (exact)";
  } else {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const auto e = pth_root(sim::estimate(sample.column(1 + j), opt.master_seed), p);
      if (j == 0 || e.mean > norm.mean) norm = e;
    }
    r.note = "max_i ||S_i||_p over dyadic i (Monte Carlo)";
  }
  const double c = 4.0 * q + 3.0;
  r.rhs = sim::make_estimate(1.0 + c * norm.mean, c * norm.std_error, reps, opt.master_seed);
  finish(r);
  return r;
}

InequalityReport check_tail(double x, std::uint64_t n, std::size_t reps,
                            const sim::ReplicateOptions& opt) {
  if (!(x > 0.0)) throw std::invalid_argument("check_tail: x must be positive");
  if (n == 0) throw std::invalid_argument("check_tail: n must be positive");
  const std::uint64_t last[] = {n};
  // Column 0: 1{max |S_i| > x}. Column 1: |S_n| 1{|S_n| > x/12}.
  const auto sample = sim::run_replicates(reps, 2, opt, [&](RngStream& rng, auto row) {
    const auto path = sim::simulate_regen_path(n, last, rng);
    const double sn = std::abs(path.sums[0]);
    row[0] = path.running_max[0] > x ? 1.0 : 0.0;
    row[1] = sn > x / 12.0 ? sn : 0.0;
  });

  InequalityReport r;
  r.kind = "tail";
  r.p_or_x = x;
  r.n = n;
  r.master_seed = opt.master_seed;
  r.lhs = sim::estimate(sample.column(0), opt.master_seed);
  const auto trunc = sim::estimate(sample.column(1), opt.master_seed);
  const double cond_l1_max = exact::cond_norms(n).l1;
  const double scale = 2.0 / x;
  r.rhs = sim::make_estimate(scale * (18.0 * trunc.mean + 55.0 * cond_l1_max + 1.0),
                             scale * 18.0 * trunc.std_error, reps, opt.master_seed);
  r.vacuous = r.rhs.mean > 1.0;
  r.note = "max_i ||E_0(S_i)||_1 = H_{n+1} - 1 (exact)";
  finish(r);
  return r;
}

void write_inequality_csv(const std::vector<InequalityReport>& reports,
                          const std::filesystem::path& path) {
  std::vector<report::Row> rows;
  for (const auto& r : reports) {
    rows.push_back({{"kind", r.kind},
                    {"p_or_x", r.p_or_x},
                    {"n", r.n},
                    {"lhs_mean", r.lhs.mean},
                    {"lhs_se", r.lhs.std_error},
                    {"rhs_mean", r.rhs.mean},
                    {"rhs_se", r.rhs.std_error},
                    {"margin", r.margin},
                    {"vacuous", r.vacuous},
                    {"verdict", std::string(to_string(r.verdict))},
                    {"master_seed", r.master_seed}});
  }
  report::emit_csv(rows,
                   {"kind", "p_or_x", "n", "lhs_mean", "lhs_se", "rhs_mean", "rhs_se", "margin",
                    "vacuous", "verdict", "master_seed"},
                   path);
}

}  // namespace revclt::ineq
