// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff
// every criterion passes.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "chain_model.hpp"
#include "exact_analytics.hpp"
#include "fclt_suite.hpp"
#include "martingale_decomp.hpp"
#include "maximal_inequalities.hpp"
#include "replicates.hpp"
#include "simulation_engine.hpp"

using namespace revclt;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<void(Outcome&)> body;
};

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void exact_oracle_agreement(Outcome& o) {
  const std::vector<double> t{1.0};
  for (std::uint64_t n : {10, 100, 1000}) {
    auto st = sim::reduce_replicates(100'000, {kSeed + n, 0}, [&](RngStream& r) {
      const double s = sim::simulate_regen_sum(n, t, r)[0];
      return s * s;
    });
    const auto e = st.to_estimate(kSeed + n);
    const double z = (e.mean - exact::sigma2(n)) / e.std_error;
    o.detail << " n=" << n << " z=" << g(z);
    o.require(std::abs(z) <= 4.0, "|z| <= 4 at n = " + std::to_string(n));
  }
}

const std::vector<std::uint64_t> kGrowthGrid{1000, 10'000, 100'000, 1'000'000};

void variance_growth(Outcome& o) {
  auto p = exact::variance_profile(kGrowthGrid);
  for (std::size_t i = 0; i < p.ratio.size(); ++i) {
    o.detail << " " << g(p.ratio[i]);
    if (i > 0) o.require(p.ratio[i] > p.ratio[i - 1], "strictly increasing");
  }
  o.require(p.ratio.back() >= 0.9, "ratio >= 0.9 at n = 10^6");
}

void cond_ma(Outcome& o) {
  auto p = exact::variance_profile(kGrowthGrid);
  for (std::size_t i = 0; i < p.cond_ratio.size(); ++i) {
    const double n = static_cast<double>(kGrowthGrid[i]);
    o.detail << " " << g(p.cond_ratio[i]);
    if (i > 0) {
      o.require(p.cond_ratio[i] < p.cond_ratio[i - 1], "strictly decreasing");
      o.require(p.cond_ratio[i] <= 1.2 * std::log(2.0) / std::log(n),
                "<= 1.2 ln2 / ln n at n = " + g(n));
    }
  }
}

void regeneration_laws(Outcome& o) {
  auto m = sim::run_replicates(1'000'000, 1, {kSeed, 0}, [](RngStream& r, std::span<double> out) {
    out[0] = static_cast<double>(sim::sample_block(r).tau);
  });
  const auto tau = m.column(0);
  std::vector<double> ind(tau.size());
  for (std::uint64_t y : {1, 2, 5, 10, 100}) {
    for (std::size_t i = 0; i < tau.size(); ++i) ind[i] = tau[i] > static_cast<double>(y);
    const auto e = sim::estimate(ind, kSeed);
    const double z = (e.mean - exact::regen_tail(y)) / e.std_error;
    o.detail << " y=" << y << ":z=" << g(z);
    o.require(std::abs(z) <= 4.0, "tail within 4 SE at y = " + std::to_string(y));
  }
  const auto mean = sim::estimate(tau, kSeed);
  o.detail << " E(tau)=" << g(mean.mean) << "+-" << g(mean.std_error);
  o.require(mean.within(2.0, 4.0), "E(tau) within 4 SE of 2");
  const double scaled = exact::regen_tail(1000) * 1e6;
  o.detail << " y^2 tail(1000)=" << g(scaled);
  o.require(std::abs(scaled - 2.0) <= 0.1, "y^2 tail within 5% of 2");
}

void pathwise_identities(Outcome& o) {
  double worst_fwd = 0.0, worst_fb = 0.0;
  for (std::uint64_t m : {1, 10, 100, 1000}) {
    for (std::uint64_t n : {1, 10, 100, 1000}) {
      for (std::uint64_t p = 0; p < 100; ++p) {
        RngStream r(kSeed + 31 * m + n, p);
        auto rec = mart::decompose_fb(sim::simulate_direct(m, r), n);
        worst_fwd = std::max(worst_fwd, rec.residual_fwd);
        worst_fb = std::max(worst_fb, rec.residual_fb);
      }
    }
  }
  o.detail << " max residual_fwd=" << g(worst_fwd) << " max residual_fb=" << g(worst_fb);
  o.require(worst_fwd < 1e-8 && worst_fb < 1e-8, "residuals < 1e-8");
}

void martingale_property(Outcome& o) {
  auto c = mart::martingale_property_check(100, 100'000, {kSeed, 0});
  o.detail << " max|E(D|x)|=" << g(c.max_conditional_mean);
  o.require(c.max_conditional_mean <= 1e-10, "analytic cancellation");
  for (std::size_t j = 0; j < c.lag_products.size(); ++j) {
    const auto& e = c.lag_products[j];
    o.detail << " corr" << j + 1 << "=" << g(c.lag_correlations[j]) << "(z=" << g(e.mean / e.std_error)
             << ")";
    o.require(e.within(0.0, 4.0), "lag " + std::to_string(j + 1) + " within 4 SE");
  }
}

void maximal_inequalities(Outcome& o) {
  std::vector<ineq::InequalityReport> reports;
  for (std::uint64_t n : {10, 100, 1000}) reports.push_back(ineq::check_lp(2.0, n, 10'000, {kSeed, 0}));
  for (std::uint64_t n : {100, 1000}) {
    const double s = std::sqrt(exact::sigma2(n));
    for (double k : {1.0, 2.0, 4.0})
      reports.push_back(ineq::check_tail(k * s, n, 10'000, {kSeed, 0}));
  }
  int passed = 0;
  double min_ratio = INFINITY;
  for (const auto& r : reports) {
    passed += r.verdict == ineq::Verdict::pass;
    min_ratio = std::min(min_ratio, r.rhs.ci_low / r.lhs.ci_high);
    o.require(r.verdict == ineq::Verdict::pass,
              r.kind + " n=" + std::to_string(r.n) + " " + ineq::to_string(r.verdict));
  }
  o.detail << " " << passed << "/" << reports.size() << " pass, min rhs/lhs CI ratio "
           << g(min_ratio);
}

void clt(Outcome& o) {
  std::vector<double> ks;
  for (std::uint64_t n : {1000, 10'000, 100'000}) {
    ks.push_back(fclt::clt_test(n, 5000, {kSeed, 0}).ks.statistic);
    o.detail << " KS(" << n << ")=" << g(ks.back());
  }
  for (std::size_t i = 1; i < ks.size(); ++i) o.require(ks[i] <= ks[i - 1], "non-increasing");
  // Oracle run at n = 10^6, 5000 reps: KS 0.0223; DKW band at level 0.001 is 0.028.
  o.require(ks.back() < 0.1, "KS < 0.1 at n = 10^5");
}

void fdd(Outcome& o) {
  const std::vector<double> t{0.25, 0.5, 0.75, 1.0};
  // reps must dominate n: the second-moment mass sits on events of
  // probability ~1/n, so smaller samples bias E W(s)W(t) low with a small SE.
  auto r = fclt::fdd_cov_test(t, 10'000, 100'000, {kSeed, 0});
  o.detail << " n=10^4 max z vs exact=" << g(r.max_oracle_z);
  o.require(r.max_oracle_z <= 4.0, "every entry within 4 SE of the exact oracle");
  auto big = fclt::fdd_cov_test(t, 100'000, 5000, {kSeed, 0});
  o.detail << " n=10^5 Cov(.5,1)=" << g(big.cov[1 * 4 + 3]) << " exact " << g(big.oracle[1 * 4 + 3])
           << " robust " << g(big.robust_cov[1 * 4 + 3]) << " limit 0.25";
  const double ratio = exact::sigma2(500'000) / exact::sigma2(1'000'000);
  o.detail << " sigma2(n/2)/sigma2(n) at 10^6=" << g(ratio);
  o.require(std::abs(ratio - 0.5) <= 0.05, "scale ratio within 0.05 of 1/2");
}

void tightness(Outcome& o) {
  const std::vector<double> d{0.01, 0.25};
  auto rows = fclt::tightness_modulus(d, 0.5, 10'000, 10'000, {kSeed, 0});
  o.detail << " scaled(0.01)=" << g(rows[0].scaled) << " scaled(0.25)=" << g(rows[1].scaled)
           << "+-" << g(rows[1].scaled_se);
  o.require(rows[0].scaled < rows[1].scaled, "strictly below");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "exact-oracle agreement of Var(S_n)", 60, exact_oracle_agreement},
      {2, "variance growth sigma_n^2 / (2n ln n)", 10, variance_growth},
      {3, "conditional-mean norm ratio", 10, cond_ma},
      {4, "regeneration laws", 60, regeneration_laws},
      {5, "pathwise decomposition identities", 60, pathwise_identities},
      {6, "martingale property", 60, martingale_property},
      {7, "maximal inequalities", 300, maximal_inequalities},
      {8, "CLT against N(0, 1/2)", 600, clt},
      {9, "finite-dimensional covariances", 600, fdd},
      {10, "tightness table", 600, tightness},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs <= c.budget_seconds, "runtime budget " + g(c.budget_seconds) + " s");
    failures += !o.pass;
    std::printf("%s %2d %s:%s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("INFO 11 path-space convergence, rates and the limiting tail-mass constant are "
              "reported by the CLI, not asserted\n");
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
