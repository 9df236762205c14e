#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "csv.hpp"
#include "doctest.h"
#include "exact_analytics.hpp"
#include "fclt_suite.hpp"
#include "csv_cell.hpp"
#include "test_util.hpp"

using namespace revclt;

TEST_SUITE("fclt_suite") {

TEST_CASE("normal cdf") {
  CHECK(fclt::normal_cdf(0.0) == 0.5);
  CHECK(fclt::normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(fclt::normal_cdf(-8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-9));
}

TEST_CASE("KS statistic basics") {
  auto zeros = fclt::EmpiricalSample::from(std::vector<double>(50, 0.0), 1, 1.0);
  CHECK(fclt::ks_stat(zeros, 0.5).statistic == doctest::Approx(0.5));
  CHECK_THROWS_AS(fclt::ks_stat(fclt::EmpiricalSample::from({1, 2, 3}, 1, 1), 1.0),
                  std::invalid_argument);

  std::mt19937_64 gen(123);
  std::normal_distribution<double> z(0.0, std::sqrt(0.5));
  std::vector<double> v(10'000);
  for (auto& x : v) x = z(gen);
  auto s = fclt::EmpiricalSample::from(v, 1, 1.0);
  CHECK(std::is_sorted(s.values.begin(), s.values.end()));
  auto ks = fclt::ks_stat(s, 0.5);
  CHECK(ks.statistic < 0.03);
  CHECK(ks.statistic >= 0.0);
  CHECK(ks.p_value_bound == doctest::Approx(std::min(1.0, 2 * std::exp(-2e4 * ks.statistic * ks.statistic))));

  std::vector<double> scaled(v);
  for (auto& x : scaled) x /= std::sqrt(0.5);
  auto ks1 = fclt::ks_stat(fclt::EmpiricalSample::from(scaled, 1, 1.0), 1.0);
  CHECK(ks1.statistic == doctest::Approx(ks.statistic).epsilon(1e-12));
  CHECK(fclt::dkw_epsilon(10'000, 0.01) == doctest::Approx(std::sqrt(std::log(200.0) / 2e4)));
}

TEST_CASE("two-sample KS") {
  const std::vector<double> a{1, 2, 3, 4}, b{1, 2, 3, 4}, c{5, 6, 7, 8};
  CHECK(fclt::ks_two_sample(a, b) == 0.0);
  CHECK(fclt::ks_two_sample(a, c) == 1.0);
  const std::vector<double> d{2.5};
  CHECK(fclt::ks_two_sample(a, d) == doctest::Approx(0.5));
}

TEST_CASE("CLT moments and symmetry") {
  auto r = fclt::clt_test(1000, 5000, {81, 0});
  CHECK(r.mean.within(0.0, 4.0));
  CHECK(r.second_moment.within(1.0, 4.0));
  CHECK(r.ks.reference_variance == 0.5);
  auto s = fclt::sample_normalized_sums(1000, 5000, {81, 0});
  std::vector<double> neg(s.values.rbegin(), s.values.rend());
  for (auto& x : neg) x = -x;
  CHECK(fclt::ks_two_sample(s.values, neg) < fclt::dkw_epsilon(5000, 0.001));
  CHECK_THROWS_AS(fclt::clt_test(5, 100, {}), std::invalid_argument);
}

TEST_CASE("conditional CLT references and grid") {
  CHECK(fclt::reference_cos(1.0) == doctest::Approx(std::exp(-0.25)));
  CHECK(fclt::reference_cos(1.0) == doctest::Approx(0.7788).epsilon(1e-4));
  auto g = fclt::default_start_grid();
  CHECK(g.size() == 20);
  CHECK(std::find(g.begin(), g.end(), 0.0) == g.end());
  CHECK(g.front() == -1.0);
  CHECK(g.back() == 1.0);

  auto rep = fclt::conditional_clt_test(g, 200, 100, {82, 0});
  CHECK(rep.rows.size() == 20 * 4);
  CHECK(rep.fraction_exceeding.size() == 2);
  for (const auto& row : rep.rows) {
    if (row.function.rfind("sin", 0) == 0) CHECK(row.reference == 0.0);
  }
  for (double f : rep.fraction_exceeding) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }
}

TEST_CASE("finite-dimensional covariances") {
  const std::vector<double> t{0.25, 0.5, 1.0};
  auto r = fclt::fdd_cov_test(t, 1000, 20'000, {83, 0});
  const std::size_t k = t.size();
  CHECK(r.cov[k * k - 1] == doctest::Approx(1.0).epsilon(0.1));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double want = exact::cross_moment(r.indices[i], r.indices[j]) / exact::sigma2(1000);
      CHECK(r.oracle[i * k + j] == doctest::Approx(want));
      CHECK(r.limit[i * k + j] == doctest::Approx(std::min(t[i], t[j]) / 2));
      INFO("entry " << i << "," << j);
      CHECK(std::abs(r.cov[i * k + j] - want) <= 4 * r.cov_se[i * k + j]);
    }
  }
  CHECK(r.max_oracle_z <= 4.0);
  REQUIRE(r.increment_corr.size() == k - 1);
  CHECK_THROWS_AS(fclt::fdd_cov_test(std::vector<double>{1.0}, 10, 100, {}), std::invalid_argument);
}

TEST_CASE("iqr variance") {
  // Quartiles of 0..4 are 1 and 3; order must not matter.
  const double unit = 1.0 / (1.3489795003921634 * 1.3489795003921634);
  CHECK(fclt::iqr_variance({4, 0, 3, 1, 2}) == doctest::Approx(4.0 * unit));
  CHECK(fclt::iqr_variance({12, 0, 9, 3, 6}) == doctest::Approx(36.0 * unit));
  CHECK_THROWS_AS(fclt::iqr_variance({1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("limit covariance and increment decorrelation at n = 10^5") {
  const std::vector<double> t{0.25, 0.5, 0.75, 1.0};
  auto big = fclt::fdd_cov_test(t, 100'000, 5000, {86, 0});
  auto small = fclt::fdd_cov_test(t, 1000, 5000, {86, 0});
  // Tolerance frozen from nine seeds: robust (0.5, 1) entry 0.271..0.306.
  CHECK(std::abs(big.robust_cov[1 * 4 + 3] - 0.25) <= 0.08);
  auto worst = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double c : v) m = std::max(m, std::abs(c));
    return m;
  };
  CHECK(worst(big.increment_corr) < worst(small.increment_corr));
}

TEST_CASE("exact scale relation at n = 10^6") {
  const double ratio = exact::sigma2(500'000) / exact::sigma2(1'000'000);
  CHECK(std::abs(ratio - 0.5) < 0.05);
}

TEST_CASE("tightness modulus") {
  const std::vector<double> delta{1.0};
  // eps sigma_n > n makes the event impossible.
  auto none = fclt::tightness_modulus(delta, 200.0, 1000, 200, {84, 0});
  CHECK(none[0].probability.mean == 0.0);

  const std::vector<double> grid{0.01, 0.25};
  auto rows = fclt::tightness_modulus(grid, 0.5, 10'000, 10'000, {85, 0});
  CHECK(rows[0].scaled < rows[1].scaled);
  CHECK(rows[0].horizon == 100);
  CHECK(rows[1].horizon == 2500);

  auto se = [](std::size_t reps) {
    const std::vector<double> g{0.25};
    return fclt::tightness_modulus(g, 0.5, 1000, reps, {86, 0})[0].probability.std_error;
  };
  const double ratio = se(8000) / se(4000);
  CHECK(ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.2));
}

TEST_CASE("uniform integrability diagnostic") {
  const std::vector<double> M{0.0, 1e9};
  const std::vector<std::uint64_t> n{100, 1000};
  auto rows = fclt::ui_diagnostic(M, n, 5000, {87, 0});
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    if (r.M == 0.0) CHECK(r.tail_mass.within(1.0, 4.0));
    else CHECK(r.tail_mass.mean == 0.0);
  }
}

TEST_CASE("nested conditional variance") {
  auto r1 = fclt::key2_estimate(1, 50, 50, {88, 0});
  CHECK(r1.raw_l1.mean == 0.0);
  CHECK(r1.corrected_l2 == 0.0);
  CHECK(r1.noise_bias == 0.0);
  CHECK_THROWS_AS(fclt::key2_estimate(20'000, 10, 10, {}), std::invalid_argument);

  auto a = fclt::key2_estimate(100, 200, 100, {89, 0});
  auto b = fclt::key2_estimate(100, 200, 200, {89, 0});
  CHECK(b.noise_bias / a.noise_bias == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("key2 trend") {
  const auto small = fclt::key2_estimate(100, 1000, 1000, {90, 0});
  const auto big = fclt::key2_estimate(1000, 1000, 1000, {90, 0});
  CHECK(big.raw_l1.mean <= small.raw_l1.mean);
}

TEST_CASE("report files") {
  TempDir dir;
  std::vector<fclt::CltReport> clt{fclt::clt_test(10, 100, {1, 0})};
  fclt::write_clt_csv(clt, dir / "clt.csv");
  auto t = report::read_csv(dir / "clt.csv");
  CHECK(t.header.front() == "n");
  CHECK(t.header.back() == "master_seed");
  CHECK(num(t.rows[0][2]) == clt[0].ks.statistic);

  const std::vector<double> tg{0.5, 1.0};
  fclt::write_fdd_csv(fclt::fdd_cov_test(tg, 10, 100, {1, 0}), dir / "fdd.csv");
  CHECK(report::read_csv(dir / "fdd.csv").rows.size() == 3);  // s <= t

  const std::vector<double> dg{0.1, 0.5};
  auto tr = fclt::tightness_modulus(dg, 0.5, 100, 100, {1, 0});
  fclt::write_tightness_csv(tr, 0.5, 100, 1, dir / "tight.csv");
  CHECK(report::read_csv(dir / "tight.csv").rows.size() == 2);

  const std::vector<double> M{1.0};
  const std::vector<std::uint64_t> n{10};
  fclt::write_ui_csv(fclt::ui_diagnostic(M, n, 100, {1, 0}), dir / "ui.csv");
  CHECK(report::read_csv(dir / "ui.csv").rows.size() == 1);

  fclt::write_key2_csv({fclt::key2_estimate(10, 10, 10, {1, 0})}, dir / "key2.csv");
  CHECK(report::read_csv(dir / "key2.csv").rows.size() == 1);

  std::vector<fclt::ConditionalCltReport> cc{
      fclt::conditional_clt_test(std::vector<double>{-0.5, 0.5}, 10, 10, {1, 0})};
  fclt::write_conditional_clt_csv(cc, dir / "cc.csv");
  CHECK(report::read_csv(dir / "cc.csv").header ==
        std::vector<std::string>{"n", "inner_reps", "kind", "x", "function", "epsilon", "value",
                                 "se", "reference", "deviation", "master_seed"});
}

}
