#include <cmath>
#include <string>
#include <vector>

#include "chain_model.hpp"
#include "csv.hpp"
#include "doctest.h"
#include "exact_analytics.hpp"
#include "martingale_decomp.hpp"
#include "replicates.hpp"
#include "simulation_engine.hpp"
#include "csv_cell.hpp"
#include "test_util.hpp"

using namespace revclt;

namespace {

// (1/n) sum_{i<n} sum_{j<=i} (1 - a)^j sign(x), accumulated term by term.
double theta_direct(std::uint64_t n, double x) {
  long double outer = 0.0L, inner = 0.0L;
  for (std::uint64_t i = 0; i < n; ++i) {
    inner += chain::q_power_f({x}, i);
    outer += inner;
  }
  return static_cast<double>(outer / n);
}

// n * int_0^1 theta(a)^2 (2a - a^2) da by composite Simpson: Var(M_n) under
// stationarity, since E D^2 = pi(theta^2) - pi((Q theta)^2).
double martingale_variance(std::uint64_t n) {
  constexpr int kIntervals = 2'000'000;
  const double h = 1.0 / kIntervals;
  long double s = 0.0L;
  for (int i = 0; i <= kIntervals; ++i) {
    const double a = i * h;
    const double th = mart::theta_eval(n, {a});
    const double f = th * th * (2 * a - a * a);
    s += (i == 0 || i == kIntervals ? 1 : (i % 2 ? 4 : 2)) * f;
  }
  return static_cast<double>(s * h / 3) * n;
}

}  // namespace

TEST_SUITE("martingale_decomp") {

TEST_CASE("theta examples") {
  CHECK(mart::theta_eval(1, {0.5}) == 1.0);
  CHECK(mart::theta_eval(2, {0.5}) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(mart::theta_eval(2, {-0.5}) == doctest::Approx(-1.25).epsilon(1e-15));
  CHECK(mart::theta_eval(7, {0.0}) == 0.0);
  CHECK(mart::theta_bar(1, {0.3}) == 0.0);
}

TEST_CASE("theta against the direct double sum") {
  for (std::uint64_t n : {1, 2, 3, 10, 64, 1000}) {
    for (double x : {1e-12, 1e-9, 3e-6, 1e-4, 4e-3, 0.01, 0.2, 0.5, 0.77, 1.0}) {
      const double want = theta_direct(n, x);
      INFO("n = " << n << ", x = " << x);
      CHECK(mart::theta_eval(n, {x}) == doctest::Approx(want).epsilon(1e-10));
      CHECK(mart::theta_eval(n, {-x}) == -mart::theta_eval(n, {x}));
      const double t = mart::theta_eval(n, {x});
      CHECK(t >= 1.0 - 1e-12);
      CHECK(t <= std::min<double>(n, 1.0 / x) * (1 + 1e-12));
    }
  }
}

TEST_CASE("constant path") {
  auto t = sim::trajectory_from_states({0.5, 0.5, 0.5, 0.5});
  auto fwd = mart::decompose_forward(t, 2);
  CHECK(fwd.S[3] == 3.0);
  CHECK(fwd.M[3] + fwd.R[3] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(fwd.residual_fwd < 1e-12);
  auto t2 = sim::trajectory_from_states({0.5, 0.5, 0.5});
  CHECK(mart::decompose_fb(t2, 2).residual_fb < 1e-12);
}

TEST_CASE("n = 1 hand expansion") {
  RngStream r(3, 3);
  auto t = sim::simulate_direct(40, r);
  auto rec = mart::decompose_fb(t, 1);
  double rsum = 0.0;
  for (std::size_t k = 1; k <= 40; ++k) {
    const double d = t.x_vals[k] - (1 - std::abs(t.states[k - 1])) * t.x_vals[k - 1];
    CHECK(rec.D[k] == doctest::Approx(d).epsilon(1e-14));
    rsum += chain::cond_sum(t.state(k - 1), 1);
    CHECK(rec.R[k] == doctest::Approx(rsum).epsilon(1e-13));
  }
  CHECK(rec.residual_fwd < 1e-12);
}

TEST_CASE("identities on random paths") {
  for (std::uint64_t m : {1, 10, 100, 1000}) {
    for (std::uint64_t n : {1, 10, 100, 1000}) {
      for (std::uint64_t p = 0; p < 10; ++p) {
        RngStream r(m * 7919 + n, p);
        auto t = sim::simulate_direct(m, r);
        auto rec = mart::decompose_fb(t, n);
        INFO("m = " << m << ", n = " << n << ", path " << p);
        CHECK(rec.residual_fwd < 1e-8);
        CHECK(rec.residual_fb < 1e-8);
        CHECK(rec.residual_fwd <= rec.tolerance());
        CHECK(mart::pairwise_relation_residual(t, rec) < 1e-10);
      }
    }
  }
  RngStream r(50, 50);
  auto t = sim::simulate_direct(50, r);
  CHECK(mart::decompose_fb(t, 50).residual_fb < 1e-8);
}

TEST_CASE("record layout") {
  RngStream r(8, 1);
  auto t = sim::simulate_direct(12, r);
  auto rec = mart::decompose_fb(t, 5);
  CHECK(rec.m == 12);
  CHECK(rec.n == 5);
  CHECK(rec.theta.size() == 13);
  CHECK(rec.D[0] == 0.0);
  CHECK(rec.M_tilde[0] == 0.0);
  CHECK(rec.D_tilde[12] == 0.0);
  CHECK(rec.M_tilde[1] == rec.D_tilde[0]);
  CHECK_THROWS_AS(mart::decompose_fb(t, 0), std::invalid_argument);
}

TEST_CASE("decomposition csv") {
  TempDir dir;
  RngStream r(8, 2);
  auto t = sim::simulate_direct(6, r);
  auto rec = mart::decompose_fb(t, 3);
  mart::write_decomposition_csv(t, rec, dir / "d.csv");
  auto table = report::read_csv(dir / "d.csv");
  CHECK(table.header == std::vector<std::string>{"k", "xi", "theta", "D", "M", "D_tilde", "M_tilde",
                                                 "R", "R_bar", "S", "residual_fwd", "residual_fb"});
  REQUIRE(table.rows.size() == 7);
  CHECK(table.rows[0][3].empty());
  CHECK(table.rows[6][5].empty());
  CHECK(num(table.rows[4][9]) == t.prefix_sums[4]);
  CHECK(num(table.rows[2][3]) == rec.D[2]);
}

TEST_CASE("martingale property") {
  auto c = mart::martingale_property_check(5, 100'000, {61, 0});
  CHECK(c.max_conditional_mean <= 1e-10);
  CHECK(c.d_mean.within(0.0, 4.0));
  REQUIRE(c.lag_products.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    INFO("lag " << j + 1 << " corr " << c.lag_correlations[j]);
    CHECK(c.lag_products[j].within(0.0, 4.0));
  }
  // x = 0.7, n = 5: (Q theta)(x) - (1 - |x|) theta(x)
  auto th = [](double x) { return mart::theta_eval(5, {x}); };
  CHECK(std::abs(chain::apply_q_odd(th, {0.7}) - 0.3 * th(0.7)) <= 1e-10);
}

TEST_CASE("martingale variance against sigma_n^2") {
  const std::uint64_t n = 1000;
  const double oracle = martingale_variance(n) / exact::sigma2(n);
  CHECK(oracle > 0.5);
  CHECK(oracle < 1.5);
  auto st = sim::reduce_replicates(20'000, {62, 0}, [n](RngStream& r) {
    auto t = sim::simulate_direct(n, r);
    return std::pow(mart::decompose_forward(t, n).M[n], 2);
  });
  auto e = st.to_estimate(62);
  INFO("oracle " << oracle << " estimate " << e.mean / exact::sigma2(n));
  CHECK(e.within(oracle * exact::sigma2(n), 4.0));
}

TEST_CASE("remainder L1 bound") {
  for (std::uint64_t n : {10, 100, 1000}) {
    auto st = sim::reduce_replicates(2000, {63, 0}, [n](RngStream& r) {
      auto t = sim::simulate_direct(n, r);
      return std::abs(mart::decompose_forward(t, n).R[n]);
    });
    const double bound = 3 * exact::cond_norms(n).l1;
    INFO("n = " << n);
    CHECK(st.to_estimate(63).ci_high <= bound);
  }
}

}
