#include "fclt_suite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "csv.hpp"
#include "exact_analytics.hpp"
#include "simulation_engine.hpp"

namespace revclt::fclt {

EmpiricalSample EmpiricalSample::from(std::vector<double> values, std::uint64_t n,
                                      double normalization) {
  std::sort(values.begin(), values.end());
  return {std::move(values), n, normalization};
}

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double dkw_epsilon(std::size_t reps, double alpha) noexcept {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(reps)));
}

KsResult ks_stat(const EmpiricalSample& sample, double variance) {
  if (sample.reps() < 10) throw std::invalid_argument("ks_stat: need at least 10 values");
  if (!(variance > 0.0)) throw std::invalid_argument("ks_stat: variance must be positive");
  const double sd = std::sqrt(variance);
  const double n = static_cast<double>(sample.reps());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.values.size(); ++i) {
    const double f = normal_cdf(sample.values[i] / sd);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  KsResult r;
  r.statistic = d;
  r.reps = sample.reps();
  r.reference_variance = variance;
  r.p_value_bound = std::min(1.0, 2.0 * std::exp(-2.0 * n * d * d));
  return r;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

EmpiricalSample sample_normalized_sums(std::uint64_t n, std::size_t reps,
                                       const sim::ReplicateOptions& opt) {
  const double sigma = std::sqrt(exact::sigma2(n));
  const std::uint64_t last[] = {n};
  const auto m = sim::run_replicates(reps, 1, opt, [&](RngStream& rng, auto row) {
    row[0] = sim::simulate_regen_path(n, last, rng).sums[0] / sigma;
  });
  return EmpiricalSample::from(m.column(0), n, sigma);
}

CltReport clt_test(std::uint64_t n, std::size_t reps, const sim::ReplicateOptions& opt) {
  if (n < 10) throw std::invalid_argument("clt_test: n must be at least 10");
  const EmpiricalSample s = sample_normalized_sums(n, reps, opt);
  std::vector<double> sq(s.values.size());
  std::transform(s.values.begin(), s.values.end(), sq.begin(), [](double v) { return v * v; });
  CltReport r;
  r.n = n;
  r.ks = ks_stat(s, kLimitVariance);
  r.mean = sim::estimate(s.values, opt.master_seed);
  r.second_moment = sim::estimate(sq, opt.master_seed);
  r.master_seed = opt.master_seed;
  return r;
}

std::vector<double> default_start_grid() {
  std::vector<double> g;
  for (int i = -10; i <= 10; ++i)
    if (i != 0) g.push_back(i / 10.0);
  return g;
}

double reference_cos(double b) noexcept { return std::exp(-b * b * kLimitVariance / 2.0); }

ConditionalCltReport conditional_clt_test(std::span<const double> x_grid, std::uint64_t n,
                                          std::size_t inner_reps,
                                          const sim::ReplicateOptions& opt,
                                          std::vector<double> epsilons) {
  if (x_grid.empty()) throw std::invalid_argument("conditional_clt_test: empty start grid");
  for (double x : x_grid)
    if (!(x >= -1.0 && x <= 1.0))
      throw std::invalid_argument("conditional_clt_test: start state outside [-1, 1]");
  const double sigma = std::sqrt(exact::sigma2(n));
  const std::uint64_t last[] = {n};
  // Replicate i starts at x_grid[i / inner_reps]; every replicate owns its
  // own stream.
  const auto m = sim::run_replicates(
      x_grid.size() * inner_reps, 4, opt, [&](RngStream& rng, auto row) {
        const double x0 = x_grid[rng.stream_index() / inner_reps];
        const double w = sim::simulate_regen_path(n, last, rng, chain::ChainState{x0}).sums[0] / sigma;
        row[0] = std::cos(w);
        row[1] = std::sin(w);
        row[2] = std::cos(2.0 * w);
        row[3] = std::sin(2.0 * w);
      });

  static const char* kNames[] = {"cos1", "sin1", "cos2", "sin2"};
  const double refs[] = {reference_cos(1.0), 0.0, reference_cos(2.0), 0.0};
  ConditionalCltReport r;
  r.n = n;
  r.inner_reps = inner_reps;
  r.master_seed = opt.master_seed;
  r.epsilons = std::move(epsilons);
  std::vector<double> worst(x_grid.size(), 0.0);
  for (std::size_t g = 0; g < x_grid.size(); ++g) {
    for (std::size_t f = 0; f < 4; ++f) {
      std::vector<double> vals(inner_reps);
      for (std::size_t k = 0; k < inner_reps; ++k) vals[k] = m(g * inner_reps + k, f);
      ConditionalCltRow row;
      row.x = x_grid[g];
      row.function = kNames[f];
      row.estimate = sim::estimate(vals, opt.master_seed);
      row.reference = refs[f];
      row.deviation = std::abs(row.estimate.mean - refs[f]);
      worst[g] = std::max(worst[g], row.deviation);
      r.rows.push_back(std::move(row));
    }
  }
  for (double eps : r.epsilons) {
    const auto over = std::count_if(worst.begin(), worst.end(), [eps](double d) { return d > eps; });
    r.fraction_exceeding.push_back(static_cast<double>(over) / static_cast<double>(worst.size()));
  }
  return r;
}

namespace {

double sample_corr(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

double iqr_variance(std::vector<double> v) {
  if (v.size() < 4) throw std::invalid_argument("iqr_variance: need at least four values");
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double h = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  const double iqr = (q(0.75) - q(0.25)) / 1.3489795003921634;
  return iqr * iqr;
}

FddReport fdd_cov_test(std::span<const double> t_grid, std::uint64_t n, std::size_t reps,
                       const sim::ReplicateOptions& opt) {
  if (t_grid.size() < 2) throw std::invalid_argument("fdd_cov_test: need at least two grid points");
  FddReport r;
  r.n = n;
  r.reps = reps;
  r.master_seed = opt.master_seed;
  r.t_grid.assign(t_grid.begin(), t_grid.end());
  r.indices = sim::grid_indices(n, t_grid);
  const double s2n = exact::sigma2(n);
  const double sigma = std::sqrt(s2n);
  const std::size_t g = t_grid.size();

  const auto m = sim::run_replicates(reps, g, opt, [&](RngStream& rng, auto row) {
    const auto path = sim::simulate_regen_path(n, r.indices, rng);
    for (std::size_t i = 0; i < g; ++i) row[i] = path.sums[i] / sigma;
  });
  std::vector<std::vector<double>> cols(g);
  for (std::size_t i = 0; i < g; ++i) cols[i] = m.column(i);

  r.cov.resize(g * g);
  r.cov_se.resize(g * g);
  r.oracle.resize(g * g);
  r.limit.resize(g * g);
  r.robust_cov.resize(g * g);
  std::vector<double> prod(reps), sum(reps), diff(reps);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      for (std::size_t k = 0; k < reps; ++k) prod[k] = cols[i][k] * cols[j][k];
      const auto e = sim::estimate(prod, opt.master_seed);
      const std::size_t at = i * g + j;
      r.cov[at] = e.mean;
      r.cov_se[at] = e.std_error;
      r.oracle[at] = exact::cross_moment(r.indices[i], r.indices[j]) / s2n;
      r.limit[at] = 0.5 * std::min(t_grid[i], t_grid[j]);
      for (std::size_t k = 0; k < reps; ++k) {
        sum[k] = cols[i][k] + cols[j][k];
        diff[k] = cols[i][k] - cols[j][k];
      }
      r.robust_cov[at] = 0.25 * (iqr_variance(sum) - iqr_variance(diff));
      r.max_limit_deviation = std::max(r.max_limit_deviation, std::abs(e.mean - r.limit[at]));
      if (e.std_error > 0.0)
        r.max_oracle_z = std::max(r.max_oracle_z, std::abs(e.mean - r.oracle[at]) / e.std_error);
    }
  }
  for (std::size_t i = 0; i + 1 < g; ++i) {
    std::vector<double> inc(reps);
    for (std::size_t k = 0; k < reps; ++k) inc[k] = cols[i + 1][k] - cols[i][k];
    r.increment_corr.push_back(sample_corr(inc, cols[i]));
    const std::uint64_t a = r.indices[i];
    const std::uint64_t b = r.indices[i + 1];
    if (a == 0 || b == a) {
      r.increment_corr_oracle.push_back(std::nan(""));
    } else {
      const double s2a = exact::sigma2(a);
      r.increment_corr_oracle.push_back((exact::cross_moment(a, b) - s2a) /
                                        std::sqrt(s2a * exact::sigma2(b - a)));
    }
  }
  return r;
}

std::vector<TightnessRow> tightness_modulus(std::span<const double> delta_grid, double eps,
                                            std::uint64_t n, std::size_t reps,
                                            const sim::ReplicateOptions& opt) {
  if (!(eps > 0.0)) throw std::invalid_argument("tightness_modulus: epsilon must be positive");
  const double nd = static_cast<double>(n);
  std::vector<std::uint64_t> horizon;
  for (double d : delta_grid) {
    if (!(d > 0.0)) throw std::invalid_argument("tightness_modulus: delta must be positive");
    horizon.push_back(std::min(n, static_cast<std::uint64_t>(std::floor(nd * d * (1.0 + 1e-12)))));
  }
  std::vector<std::size_t> order(horizon.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return horizon[a] < horizon[b]; });
  std::vector<std::uint64_t> checkpoints;
  for (auto o : order) checkpoints.push_back(horizon[o]);

  const double level = eps * std::sqrt(exact::sigma2(n));
  const auto m = sim::run_replicates(reps, order.size(), opt, [&](RngStream& rng, auto row) {
    const auto path = sim::simulate_regen_path(n, checkpoints, rng);
    for (std::size_t c = 0; c < order.size(); ++c)
      row[order[c]] = path.running_max[c] > level ? 1.0 : 0.0;
  });
  std::vector<TightnessRow> rows;
  for (std::size_t i = 0; i < delta_grid.size(); ++i) {
    TightnessRow row;
    row.delta = delta_grid[i];
    row.horizon = horizon[i];
    row.probability = sim::estimate(m.column(i), opt.master_seed);
    row.scaled = row.probability.mean / row.delta;
    row.scaled_se = row.probability.std_error / row.delta;
    rows.push_back(row);
  }
  return rows;
}

std::vector<UiRow> ui_diagnostic(std::span<const double> M_grid,
                                 std::span<const std::uint64_t> n_grid, std::size_t reps,
                                 const sim::ReplicateOptions& opt) {
  std::vector<UiRow> rows;
  for (std::uint64_t n : n_grid) {
    const EmpiricalSample s = sample_normalized_sums(n, reps, opt);
    std::vector<double> mass(s.values.size());
    for (double M : M_grid) {
      if (!(M >= 0.0)) throw std::invalid_argument("ui_diagnostic: M must be non-negative");
      std::transform(s.values.begin(), s.values.end(), mass.begin(),
                     [M](double w) { return std::abs(w) > M ? w * w : 0.0; });
      rows.push_back({M, n, sim::estimate(mass, opt.master_seed)});
    }
  }
  return rows;
}

Key2Report key2_estimate(std::uint64_t n, std::size_t outer_reps, std::size_t inner_reps,
                         const sim::ReplicateOptions& opt) {
  if (n == 0 || n > 10'000) throw std::invalid_argument("key2_estimate: n must lie in [1, 10^4]");
  if (inner_reps < 2) throw std::invalid_argument("key2_estimate: inner_reps must be at least 2");
  const double s2 = exact::sigma2(n);
  const std::uint64_t last[] = {n};
  // Columns: |m - s2| / s2, (m - s2)^2 / s2^2, var_inner(m) / s2^2.
  const auto m = sim::run_replicates(outer_reps, 3, opt, [&](RngStream& rng, auto row) {
    const chain::ChainState x0 = chain::sample_stationary(rng);
    sim::RunningStats inner;
    for (std::size_t j = 0; j < inner_reps; ++j) {
      const double sn = sim::simulate_regen_path(n, last, rng, x0).sums[0];
      inner.push(sn * sn);
    }
    const double dev = (inner.mean() - s2) / s2;
    row[0] = std::abs(dev);
    row[1] = dev * dev;
    row[2] = inner.variance() / static_cast<double>(inner_reps) / (s2 * s2);
  });
  Key2Report r;
  r.n = n;
  r.outer_reps = outer_reps;
  r.inner_reps = inner_reps;
  r.master_seed = opt.master_seed;
  r.raw_l1 = sim::estimate(m.column(0), opt.master_seed);
  const double msq = sim::estimate(m.column(1), opt.master_seed).mean;
  r.noise_bias = sim::estimate(m.column(2), opt.master_seed).mean;
  r.corrected_l2 = std::sqrt(std::max(0.0, msq - r.noise_bias));
  return r;
}

void write_clt_csv(const std::vector<CltReport>& reports, const std::filesystem::path& path) {
  std::vector<report::Row> rows;
  for (const auto& r : reports) {
    rows.push_back({{"n", r.n},
                    {"reps", static_cast<std::uint64_t>(r.ks.reps)},
                    {"ks_statistic", r.ks.statistic},
                    {"dkw_p_bound", r.ks.p_value_bound},
                    {"reference_variance", r.ks.reference_variance},
                    {"mean", r.mean.mean},
                    {"mean_se", r.mean.std_error},
                    {"second_moment", r.second_moment.mean},
                    {"second_moment_se", r.second_moment.std_error},
                    {"master_seed", r.master_seed}});
  }
  report::emit_csv(rows,
                   {"n", "reps", "ks_statistic", "dkw_p_bound", "reference_variance", "mean",
                    "mean_se", "second_moment", "second_moment_se", "master_seed"},
                   path);
}

void write_conditional_clt_csv(const std::vector<ConditionalCltReport>& reports,
                               const std::filesystem::path& path) {
  const report::Cell empty{};
  std::vector<report::Row> rows;
  for (const auto& r : reports) {
    for (const auto& p : r.rows) {
      rows.push_back({{"n", r.n},
                      {"inner_reps", static_cast<std::uint64_t>(r.inner_reps)},
                      {"kind", std::string("point")},
                      {"x", p.x},
                      {"function", p.function},
                      {"epsilon", empty},
                      {"value", p.estimate.mean},
                      {"se", p.estimate.std_error},
                      {"reference", p.reference},
                      {"deviation", p.deviation},
                      {"master_seed", r.master_seed}});
    }
    for (std::size_t e = 0; e < r.epsilons.size(); ++e) {
      rows.push_back({{"n", r.n},
                      {"inner_reps", static_cast<std::uint64_t>(r.inner_reps)},
                      {"kind", std::string("fraction")},
                      {"x", empty},
                      {"function", std::string("all")},
                      {"epsilon", r.epsilons[e]},
                      {"value", r.fraction_exceeding[e]},
                      {"se", empty},
                      {"reference", empty},
                      {"deviation", empty},
                      {"master_seed", r.master_seed}});
    }
  }
  report::emit_csv(rows,
                   {"n", "inner_reps", "kind", "x", "function", "epsilon", "value", "se",
                    "reference", "deviation", "master_seed"},
                   path);
}

void write_fdd_csv(const FddReport& r, const std::filesystem::path& path) {
  const report::Cell empty{};
  const std::size_t g = r.t_grid.size();
  std::vector<report::Row> rows;
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = i; j < g; ++j) {
      const std::size_t at = i * g + j;
      const bool adjacent = j == i + 1;
      rows.push_back({{"n", r.n},
                      {"reps", static_cast<std::uint64_t>(r.reps)},
                      {"s", r.t_grid[i]},
                      {"t", r.t_grid[j]},
                      {"cov", r.cov[at]},
                      {"cov_se", r.cov_se[at]},
                      {"oracle", r.oracle[at]},
                      {"limit", r.limit[at]},
                      {"robust_cov", r.robust_cov[at]},
                      {"increment_corr", adjacent ? report::Cell{r.increment_corr[i]} : empty},
                      {"increment_corr_oracle",
                       adjacent ? report::Cell{r.increment_corr_oracle[i]} : empty},
                      {"master_seed", r.master_seed}});
    }
  }
  report::emit_csv(rows,
                   {"n", "reps", "s", "t", "cov", "cov_se", "oracle", "limit", "robust_cov", "increment_corr",
                    "increment_corr_oracle", "master_seed"},
                   path);
}

void write_tightness_csv(const std::vector<TightnessRow>& trows, double eps, std::uint64_t n,
                         std::uint64_t master_seed, const std::filesystem::path& path) {
  std::vector<report::Row> rows;
  for (const auto& t : trows) {
    rows.push_back({{"n", n},
                    {"epsilon", eps},
                    {"delta", t.delta},
                    {"horizon", t.horizon},
                    {"probability", t.probability.mean},
                    {"probability_se", t.probability.std_error},
                    {"scaled", t.scaled},
                    {"scaled_se", t.scaled_se},
                    {"reps", t.probability.reps},
                    {"master_seed", master_seed}});
  }
  report::emit_csv(rows,
                   {"n", "epsilon", "delta", "horizon", "probability", "probability_se", "scaled",
                    "scaled_se", "reps", "master_seed"},
                   path);
}

void write_ui_csv(const std::vector<UiRow>& urows, const std::filesystem::path& path) {
  std::vector<report::Row> rows;
  for (const auto& u : urows) {
    rows.push_back({{"n", u.n},
                    {"M", u.M},
                    {"tail_mass", u.tail_mass.mean},
                    {"tail_mass_se", u.tail_mass.std_error},
                    {"reps", u.tail_mass.reps},
                    {"master_seed", u.tail_mass.master_seed}});
  }
  report::emit_csv(rows, {"n", "M", "tail_mass", "tail_mass_se", "reps", "master_seed"}, path);
}

void write_key2_csv(const std::vector<Key2Report>& reports, const std::filesystem::path& path) {
  std::vector<report::Row> rows;
  for (const auto& k : reports) {
    rows.push_back({{"n", k.n},
                    {"outer_reps", static_cast<std::uint64_t>(k.outer_reps)},
                    {"inner_reps", static_cast<std::uint64_t>(k.inner_reps)},
                    {"raw_l1", k.raw_l1.mean},
                    {"raw_l1_se", k.raw_l1.std_error},
                    {"noise_bias", k.noise_bias},
                    {"corrected_l2", k.corrected_l2},
                    {"master_seed", k.master_seed}});
  }
  report::emit_csv(rows,
                   {"n", "outer_reps", "inner_reps", "raw_l1", "raw_l1_se", "noise_bias",
                    "corrected_l2", "master_seed"},
                   path);
}

}  // namespace revclt::fclt
