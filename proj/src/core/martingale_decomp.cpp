#include "martingale_decomp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "csv.hpp"

namespace revclt::mart {

using chain::ChainState;
using chain::sign;

double theta_eval(std::uint64_t n, ChainState s) noexcept {
  const double a = s.magnitude();
  const double sg = sign(s.x);
  if (sg == 0.0) return 0.0;
  const double nd = static_cast<double>(n);
  if (nd * a > chain::kSeriesSwitch) {
    return sg * (1.0 - chain::geometric_tail_sum(a, n) / nd) / a;
  }
  // (1/n) sum_{k>=0} (-a)^k C(n + 1, k + 2)
  double sum = 0.0;
  double term = nd * (nd + 1.0) / 2.0;
  for (std::uint64_t k = 0; k + 1 <= n && term != 0.0; ++k) {
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    term *= -a * static_cast<double>(n - k - 1) / static_cast<double>(k + 3);
  }
  return sg * sum / nd;
}

double DecompositionRecord::tolerance() const noexcept {
  double smax = 1.0;
  for (double v : S) smax = std::max(smax, std::abs(v));
  return 1e-8 * smax;
}

namespace {

std::vector<double> squares(const std::vector<double>& v) {
  std::vector<double> sq(v.size());
  std::transform(v.begin(), v.end(), sq.begin(), [](double x) { return x * x; });
  return sq;
}

void require_path(const sim::Trajectory& traj, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("decompose: horizon n must be positive");
  if (traj.length() < 1) throw std::invalid_argument("decompose: trajectory length must be >= 1");
}

}  // namespace

DecompositionRecord decompose_forward(const sim::Trajectory& traj, std::uint64_t n) {
  require_path(traj, n);
  const std::size_t m = traj.length();
  DecompositionRecord r;
  r.n = n;
  r.m = m;
  r.theta.resize(m + 1);
  r.D.assign(m + 1, 0.0);
  r.M.assign(m + 1, 0.0);
  r.R.assign(m + 1, 0.0);
  r.S = traj.prefix_sums;
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t k = 0; k <= m; ++k) r.theta[k] = theta_eval(n, traj.state(k));

  // D_{k+1} = theta(xi_{k+1}) - (Q theta)(xi_k), and Q theta = (1 - |x|) theta
  // because theta^n is odd.
  const double thetabar0 = r.theta[0] - traj.x_vals[0];
  double cond_acc = 0.0;
  for (std::size_t k = 1; k <= m; ++k) {
    const ChainState prev = traj.state(k - 1);
    r.D[k] = r.theta[k] - (1.0 - prev.magnitude()) * r.theta[k - 1];
    r.M[k] = r.M[k - 1] + r.D[k];
    cond_acc += chain::cond_sum(prev, n);
    const double thetabar_k = r.theta[k] - traj.x_vals[k];
    r.R[k] = thetabar0 - thetabar_k + inv_n * cond_acc;
    r.residual_fwd = std::max(r.residual_fwd, std::abs(r.S[k] - r.M[k] - r.R[k]));
  }
  return r;
}

DecompositionRecord decompose_fb(const sim::Trajectory& traj, std::uint64_t n) {
  DecompositionRecord r = decompose_forward(traj, n);
  const std::size_t m = r.m;
  r.D_tilde.assign(m + 1, 0.0);
  r.M_tilde.assign(m + 1, 0.0);
  r.R_bar.assign(m + 1, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);

  // Backward conditional expectations reduce to Q applied at the later
  // state: D~_k = theta(xi_k) - (1 - |xi_{k+1}|) theta(xi_{k+1}).
  for (std::size_t k = 0; k < m; ++k) {
    const ChainState next = traj.state(k + 1);
    r.D_tilde[k] = r.theta[k] - (1.0 - next.magnitude()) * r.theta[k + 1];
  }
  double prev_cond = chain::cond_sum(traj.state(0), n);
  for (std::size_t k = 1; k <= m; ++k) {
    r.M_tilde[k] = r.M_tilde[k - 1] + r.D_tilde[k - 1];
    const double cur_cond = chain::cond_sum(traj.state(k), n);
    r.R_bar[k] = r.R_bar[k - 1] + inv_n * (prev_cond + cur_cond);
    prev_cond = cur_cond;
    const double rebuilt = 0.5 * ((traj.x_vals[k] - traj.x_vals[0]) + (r.M[k] + r.M_tilde[k]) +
                                  r.R_bar[k]);
    r.residual_fb = std::max(r.residual_fb, std::abs(r.S[k] - rebuilt));
  }
  return r;
}

double pairwise_relation_residual(const sim::Trajectory& traj, const DecompositionRecord& rec) {
  if (rec.D_tilde.empty()) throw std::invalid_argument("pairwise check needs decompose_fb output");
  const double inv_n = 1.0 / static_cast<double>(rec.n);
  double worst = 0.0;
  for (std::size_t k = 0; k < rec.m; ++k) {
    const double lhs = traj.x_vals[k] + traj.x_vals[k + 1];
    const double rhs = rec.D[k + 1] + rec.D_tilde[k] +
                       inv_n * (chain::cond_sum(traj.state(k), rec.n) +
                                chain::cond_sum(traj.state(k + 1), rec.n));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

void write_decomposition_csv(const sim::Trajectory& traj, const DecompositionRecord& rec,
                             const std::filesystem::path& path) {
  const bool fb = !rec.D_tilde.empty();
  std::vector<report::Row> rows;
  rows.reserve(rec.m + 1);
  const report::Cell empty{};
  for (std::size_t k = 0; k <= rec.m; ++k) {
    report::Row row;
    row["k"] = static_cast<std::uint64_t>(k);
    row["xi"] = traj.states[k];
    row["theta"] = rec.theta[k];
    row["D"] = k == 0 ? empty : report::Cell{rec.D[k]};
    row["M"] = rec.M[k];
    row["D_tilde"] = fb && k < rec.m ? report::Cell{rec.D_tilde[k]} : empty;
    row["M_tilde"] = fb ? report::Cell{rec.M_tilde[k]} : empty;
    row["R"] = rec.R[k];
    row["R_bar"] = fb ? report::Cell{rec.R_bar[k]} : empty;
    row["S"] = rec.S[k];
    row["residual_fwd"] = rec.residual_fwd;
    row["residual_fb"] = fb ? report::Cell{rec.residual_fb} : empty;
    rows.push_back(std::move(row));
  }
  report::emit_csv(rows,
                   {"k", "xi", "theta", "D", "M", "D_tilde", "M_tilde", "R", "R_bar", "S",
                    "residual_fwd", "residual_fb"},
                   path);
}

MartingaleCheck martingale_property_check(std::uint64_t n, std::size_t reps,
                                          const sim::ReplicateOptions& opt) {
  if (n == 0) throw std::invalid_argument("martingale_property_check: n must be positive");
  MartingaleCheck out;
  out.n = n;

  // nu-integral of theta^n by a symmetric midpoint rule on [-1, 1].
  constexpr int kNodes = 2000;
  double nu_integral = 0.0;
  for (int j = 0; j < kNodes; ++j) {
    const double y = (j + 0.5) / kNodes;
    nu_integral += (theta_eval(n, {y}) * y + theta_eval(n, {-y}) * y) / kNodes;
  }
  constexpr int kGrid = 1000;
  for (int i = 0; i < kGrid; ++i) {
    const ChainState x{-1.0 + 2.0 * (i + 0.5) / kGrid};
    const double a = x.magnitude();
    const double theta = theta_eval(n, x);
    const double next_mean = (1.0 - a) * theta + a * nu_integral;
    const double cond_mean = next_mean - chain::apply_q_odd(
                                             [n](double v) { return theta_eval(n, {v}); }, x);
    out.max_conditional_mean = std::max(out.max_conditional_mean, std::abs(cond_mean));
  }

  // Columns: D_1, D_2, D_3, D_4, D_1 D_2, D_1 D_3, D_1 D_4.
  constexpr std::size_t kLags = 3;
  const auto sample = sim::run_replicates(reps, 1 + 2 * kLags, opt, [n](RngStream& rng, auto row) {
    ChainState prev = chain::sample_stationary(rng);
    double theta_prev = theta_eval(n, prev);
    double d[kLags + 1];
    for (std::size_t k = 0; k <= kLags; ++k) {
      const ChainState next = chain::step(prev, rng);
      const double theta_next = theta_eval(n, next);
      d[k] = theta_next - (1.0 - prev.magnitude()) * theta_prev;
      prev = next;
      theta_prev = theta_next;
    }
    row[0] = d[0];
    for (std::size_t j = 1; j <= kLags; ++j) {
      row[j] = d[j];
      row[kLags + j] = d[0] * d[j];
    }
  });
  const auto d0 = sample.column(0);
  out.d_mean = sim::estimate(d0, opt.master_seed);
  const auto e0 = sim::estimate(squares(d0), opt.master_seed);
  for (std::size_t j = 1; j <= kLags; ++j) {
    const auto ej = sim::estimate(squares(sample.column(j)), opt.master_seed);
    const auto prod = sim::estimate(sample.column(kLags + j), opt.master_seed);
    out.lag_products.push_back(prod);
    out.lag_correlations.push_back(prod.mean / std::sqrt(e0.mean * ej.mean));
  }
  return out;
}

}  // namespace revclt::mart
