#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "exact_analytics.hpp"
#include "fclt_suite.hpp"
#include "martingale_decomp.hpp"
#include "maximal_inequalities.hpp"
#include "replicates.hpp"
#include "simulation_engine.hpp"

#ifndef REVCLT_VERSION
#define REVCLT_VERSION "0.0.0"
#endif

namespace revclt::cli {

namespace fs = std::filesystem;
using report::Row;

const char* version() noexcept { return REVCLT_VERSION; }

namespace {

const char* status_name(Status s) {
  switch (s) {
    case Status::pass: return "PASS";
    case Status::fail: return "FAIL";
    case Status::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::string fmt(double v) { return report::format_double(v); }

class Context {
 public:
  Context(const RunConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log) {
    opt_.master_seed = cfg.master_seed;
    opt_.threads = cfg.threads;
  }

  const RunConfig& cfg() const { return cfg_; }
  const sim::ReplicateOptions& opt() const { return opt_; }
  std::ostream& log() { return log_; }

  fs::path file(const std::string& name) {
    outcome.files.push_back(name);
    return cfg_.out_dir / name;
  }

  void criterion(std::string name, Status s, bool theorem, std::string detail) {
    log_ << "  " << status_name(s) << ' ' << name << ": " << detail << '\n';
    outcome.criteria.push_back({std::move(name), s, theorem, std::move(detail)});
  }

  void check(std::string name, bool ok, bool theorem, std::string detail) {
    criterion(std::move(name), ok ? Status::pass : Status::fail, theorem, std::move(detail));
  }

  void estimate(const std::string& name, const sim::MonteCarloEstimate& e) {
    estimates_.push_back({{"name", name},
                          {"mean", e.mean},
                          {"std_error", e.std_error},
                          {"reps", e.reps},
                          {"ci_low", e.ci_low},
                          {"ci_high", e.ci_high},
                          {"master_seed", e.master_seed}});
  }

  void flush_estimates() {
    if (estimates_.empty()) return;
    report::emit_csv(estimates_,
                     {"name", "mean", "std_error", "reps", "ci_low", "ci_high", "master_seed"},
                     file("estimates.csv"));
  }

  RunOutcome outcome;

 private:
  const RunConfig& cfg_;
  std::ostream& log_;
  sim::ReplicateOptions opt_;
  std::vector<Row> estimates_;
};

bool strictly(const std::vector<double>& v, bool increasing) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (increasing ? !(v[i] > v[i - 1]) : !(v[i] < v[i - 1])) return false;
  }
  return true;
}

void run_exact(Context& ctx) {
  auto grid = ctx.cfg().grid_or({10, 100, 1'000, 10'000, 100'000, 1'000'000});
  auto prof = exact::variance_profile(grid);
  std::vector<Row> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rows.push_back({{"n", prof.n_grid[i]},
                    {"sigma2", prof.sigma2[i]},
                    {"ratio_2nlogn", prof.ratio[i]},
                    {"cond_l1", prof.cond_l1[i]},
                    {"cond_l2_sq", prof.cond_l2_sq[i]},
                    {"cond_ratio", prof.cond_ratio[i]}});
  }
  report::emit_csv(rows, {"n", "sigma2", "ratio_2nlogn", "cond_l1", "cond_l2_sq", "cond_ratio"},
                   ctx.file("variance_profile.csv"));

  std::vector<double> ratio, cond;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] >= 2) ratio.push_back(prof.ratio[i]);
    cond.push_back(prof.cond_ratio[i]);
  }
  ctx.check("variance_ratio_increasing", strictly(ratio, true), false,
            "sigma_n^2/(2n ln n) last = " + fmt(ratio.empty() ? NAN : ratio.back()));
  ctx.check("cond_ratio_decreasing", strictly(cond, false), false,
            "||E_0 S_n||_2^2/sigma_n^2 last = " + fmt(cond.back()));
}

void run_simulate(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const double target = exact::sigma2(cfg.n);
  const std::uint64_t n = cfg.n;
  auto stats = sim::reduce_replicates(cfg.reps, ctx.opt(), [n](RngStream& rng) {
    const double t = 1.0;
    const double s = sim::simulate_regen_sum(n, std::span(&t, 1), rng)[0];
    return s * s;
  });
  auto est = stats.to_estimate(cfg.master_seed);
  ctx.estimate("var_S_n", est);
  ctx.check("var_S_n_matches_exact", est.within(target, 4.0), false,
            "estimate " + fmt(est.mean) + " +- " + fmt(est.std_error) + " vs exact " +
                fmt(target));

  if (n <= sim::kMaxTrajectoryLength) {
    RngStream rng(cfg.master_seed, cfg.reps);
    auto traj = sim::simulate_direct(n, rng);
    sim::save_trajectory(traj, ctx.file("trajectory.csv"));
  } else {
    ctx.log() << "  trajectory.csv skipped: n exceeds " << sim::kMaxTrajectoryLength << '\n';
  }
}

void run_decompose(Context& ctx) {
  const auto& cfg = ctx.cfg();
  sim::Trajectory traj;
  if (!cfg.trajectory.empty()) {
    traj = sim::load_trajectory(cfg.trajectory);
  } else {
    if (cfg.n > sim::kMaxTrajectoryLength)
      throw std::invalid_argument("n exceeds the trajectory cap");
    RngStream rng(cfg.master_seed, 0);
    traj = sim::simulate_direct(cfg.n, rng);
  }
  const std::uint64_t horizon = cfg.horizon ? cfg.horizon : std::max<std::uint64_t>(1, traj.length());
  auto rec = mart::decompose_fb(traj, horizon);
  mart::write_decomposition_csv(traj, rec, ctx.file("decomposition.csv"));
  const double tol = rec.tolerance();
  ctx.check("forward_identity", rec.residual_fwd < tol, true,
            "residual " + fmt(rec.residual_fwd) + " tol " + fmt(tol));
  ctx.check("forward_backward_identity", rec.residual_fb < tol, true,
            "residual " + fmt(rec.residual_fb) + " tol " + fmt(tol));

  auto mc = mart::martingale_property_check(horizon, cfg.reps, ctx.opt());
  ctx.check("conditional_mean_zero", mc.max_conditional_mean <= 1e-10, true,
            "max |E(D | xi = x)| = " + fmt(mc.max_conditional_mean));
  ctx.estimate("D_mean", mc.d_mean);
  bool lag_ok = true;
  for (std::size_t j = 0; j < mc.lag_products.size(); ++j) {
    ctx.estimate("D_lag_product_" + std::to_string(j + 1), mc.lag_products[j]);
    lag_ok = lag_ok && mc.lag_products[j].within(0.0, 4.0);
  }
  ctx.check("martingale_lag_orthogonality", lag_ok, false, "E(D_1 D_{1+j}) within 4 SE of 0");
}

void run_ineq(Context& ctx) {
  const auto& cfg = ctx.cfg();
  std::vector<ineq::InequalityReport> reports;
  for (std::uint64_t n : cfg.grid_or({10, 100, 1'000})) {
    for (double p : cfg.p) reports.push_back(ineq::check_lp(p, n, cfg.reps, ctx.opt()));
    const double sigma = std::sqrt(exact::sigma2(n));
    for (double k : cfg.x_sigma) reports.push_back(ineq::check_tail(k * sigma, n, cfg.reps, ctx.opt()));
  }
  ineq::write_inequality_csv(reports, ctx.file("inequality_report.csv"));
  for (const auto& r : reports) {
    Status s = r.verdict == ineq::Verdict::pass   ? Status::pass
               : r.verdict == ineq::Verdict::fail ? Status::fail
                                                  : Status::inconclusive;
    std::ostringstream name;
    name << r.kind << "_n" << r.n << "_" << fmt(r.p_or_x);
    ctx.criterion(name.str(), s, true,
                  "lhs " + fmt(r.lhs.mean) + " rhs " + fmt(r.rhs.mean) +
                      (r.vacuous ? " (vacuous)" : ""));
  }
}

void run_clt(Context& ctx) {
  const auto& cfg = ctx.cfg();
  auto grid = cfg.grid_or({1'000, 10'000, 100'000});
  std::vector<fclt::CltReport> clt;
  std::vector<double> ks;
  for (std::uint64_t n : grid) {
    clt.push_back(fclt::clt_test(n, cfg.reps, ctx.opt()));
    ks.push_back(clt.back().ks.statistic);
    ctx.estimate("second_moment_n" + std::to_string(n), clt.back().second_moment);
  }
  fclt::write_clt_csv(clt, ctx.file("clt_report.csv"));
  bool monotone = true;
  for (std::size_t i = 1; i < ks.size(); ++i) monotone = monotone && ks[i] <= ks[i - 1];
  ctx.check("ks_non_increasing", monotone, false, "last KS " + fmt(ks.back()));

  std::vector<fclt::ConditionalCltReport> cond;
  const auto starts = fclt::default_start_grid();
  for (std::uint64_t n : grid)
    cond.push_back(fclt::conditional_clt_test(starts, n, cfg.inner_reps, ctx.opt()));
  fclt::write_conditional_clt_csv(cond, ctx.file("conditional_clt_report.csv"));

  auto ui = fclt::ui_diagnostic(cfg.m_grid, grid, cfg.reps, ctx.opt());
  fclt::write_ui_csv(ui, ctx.file("ui_report.csv"));
}

void run_fclt(Context& ctx) {
  const auto& cfg = ctx.cfg();
  auto fdd = fclt::fdd_cov_test(cfg.t_grid, cfg.n, cfg.reps, ctx.opt());
  fclt::write_fdd_csv(fdd, ctx.file("fdd_report.csv"));
  ctx.check("fdd_matches_exact", fdd.max_oracle_z <= 4.0, false,
            "max z " + fmt(fdd.max_oracle_z) + ", max deviation from min(s,t)/2 " +
                fmt(fdd.max_limit_deviation));

  auto tight = fclt::tightness_modulus(cfg.delta_grid, cfg.epsilon, cfg.n, cfg.reps, ctx.opt());
  fclt::write_tightness_csv(tight, cfg.epsilon, cfg.n, cfg.master_seed,
                            ctx.file("tightness_report.csv"));
  if (tight.size() >= 2) {
    ctx.check("tightness_decreasing", tight.front().scaled < tight.back().scaled, false,
              "scaled " + fmt(tight.front().scaled) + " at delta " + fmt(tight.front().delta) +
                  " vs " + fmt(tight.back().scaled));
  }

  std::vector<fclt::Key2Report> key2;
  for (std::uint64_t n : cfg.key2_grid) {
    key2.push_back(fclt::key2_estimate(n, cfg.outer_reps, cfg.inner_reps, ctx.opt()));
  }
  fclt::write_key2_csv(key2, ctx.file("key2_report.csv"));
}

void run_regen(Context& ctx) {
  const auto& cfg = ctx.cfg();
  auto taus = sim::run_replicates(cfg.blocks, 1, ctx.opt(), [](RngStream& rng, std::span<double> out) {
    out[0] = static_cast<double>(sim::sample_block(rng).tau);
  });
  const auto tau = taus.column(0);
  ctx.estimate("tau_mean", sim::estimate(tau, cfg.master_seed));

  std::vector<Row> rows;
  bool tails_ok = true;
  std::vector<double> ind(tau.size());
  for (std::uint64_t y : {1, 2, 5, 10, 100, 1000}) {
    std::transform(tau.begin(), tau.end(), ind.begin(),
                   [y](double t) { return t > static_cast<double>(y) ? 1.0 : 0.0; });
    auto e = sim::estimate(ind, cfg.master_seed);
    const double exact = exact::regen_tail(y);
    if (y <= 100) tails_ok = tails_ok && e.within(exact, 4.0);
    rows.push_back({{"y", y},
                    {"empirical_tail", e.mean},
                    {"empirical_tail_se", e.std_error},
                    {"exact_tail", exact},
                    {"master_seed", cfg.master_seed}});
  }
  report::emit_csv(rows, {"y", "empirical_tail", "empirical_tail_se", "exact_tail", "master_seed"},
                   ctx.file("regen_report.csv"));
  ctx.check("regen_tail_law", tails_ok, false, "P(tau > y) within 4 SE for y <= 100");

  const std::uint64_t n = cfg.n;
  auto counts = sim::reduce_replicates(cfg.reps, ctx.opt(), [n](RngStream& rng) {
    const std::uint64_t end = n;
    return static_cast<double>(sim::simulate_regen_path(n, std::span(&end, 1), rng).regenerations) /
           static_cast<double>(n);
  });
  ctx.estimate("regenerations_per_step", counts.to_estimate(cfg.master_seed));
}

}  // namespace

RunOutcome run(const RunConfig& cfg, std::ostream& log) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw report::IoError(cfg.out_dir.string() + ": " + ec.message());

  const auto start = std::chrono::steady_clock::now();
  Context ctx(cfg, log);

  using Step = void (*)(Context&);
  const std::pair<Command, Step> steps[] = {
      {Command::exact, run_exact}, {Command::simulate, run_simulate},
      {Command::decompose, run_decompose}, {Command::ineq, run_ineq},
      {Command::clt, run_clt}, {Command::fclt, run_fclt}, {Command::regen, run_regen}};
  for (const auto& [cmd, step] : steps) {
    if (cfg.command != Command::all && cfg.command != cmd) continue;
    log << "[" << to_string(cmd) << "]\n";
    try {
      step(ctx);
    } catch (const std::exception& e) {
      std::throw_with_nested(std::runtime_error(std::string(to_string(cmd)) + ": " + e.what()));
    }
  }
  ctx.flush_estimates();

  auto& out = ctx.outcome;
  bool failed = false, inconclusive = false;
  for (const auto& c : out.criteria) {
    if (!c.theorem) continue;
    failed = failed || c.status == Status::fail;
    inconclusive = inconclusive || c.status == Status::inconclusive;
  }
  out.exit_code = failed ? kExitFail : inconclusive ? kExitInconclusive : kExitPass;

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const fs::path manifest = cfg.out_dir / "manifest.txt";
  std::ofstream m(manifest, std::ios::binary);
  if (!m) throw report::IoError(manifest.string() + ": cannot open for writing");
  m << "revclt " << version() << '\n';
  m << "\n[config]\n" << to_key_values(cfg);
  m << "\n[run]\nwall_clock_seconds = " << fmt(secs) << "\nexit_code = " << out.exit_code << '\n';
  m << "\n[criteria]\n";
  for (const auto& c : out.criteria) {
    m << status_name(c.status) << ' ' << (c.theorem ? "theorem " : "diagnostic ") << c.name
      << ": " << c.detail << '\n';
  }
  m << "\n[files]\n";
  for (const auto& f : out.files) m << f << '\n';
  if (!m.flush()) throw report::IoError(manifest.string() + ": write failed");
  out.files.push_back("manifest.txt");
  return out;
}

}  // namespace revclt::cli
