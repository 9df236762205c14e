#include "simulation_engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "csv.hpp"

namespace revclt::sim {

using chain::ChainState;
using chain::sign;

Trajectory trajectory_from_states(std::vector<double> states, SeedSpec seed) {
  if (states.empty()) throw std::invalid_argument("trajectory needs at least xi_0");
  Trajectory t;
  t.seed = seed;
  t.x_vals.resize(states.size());
  t.prefix_sums.resize(states.size());
  double s = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!ChainState{states[i]}.valid())
      throw InvariantError("state " + std::to_string(i) + " outside [-1, 1]");
    t.x_vals[i] = sign(states[i]);
    if (i > 0) s += t.x_vals[i];
    t.prefix_sums[i] = s;
  }
  t.states = std::move(states);
  return t;
}

void validate(const Trajectory& t) {
  const std::size_t m = t.states.size();
  if (m == 0) throw InvariantError("empty trajectory");
  if (t.x_vals.size() != m || t.prefix_sums.size() != m)
    throw InvariantError("states, x_vals and prefix_sums differ in length");
  if (t.prefix_sums[0] != 0.0) throw InvariantError("prefix_sums[0] must be 0");
  for (std::size_t i = 0; i < m; ++i) {
    if (!ChainState{t.states[i]}.valid())
      throw InvariantError("states[" + std::to_string(i) + "] outside [-1, 1]");
    if (t.x_vals[i] != sign(t.states[i]))
      throw InvariantError("x_vals[" + std::to_string(i) + "] != sign(states[" +
                           std::to_string(i) + "])");
    if (i > 0 && t.prefix_sums[i] != t.prefix_sums[i - 1] + t.x_vals[i])
      throw InvariantError("prefix_sums[" + std::to_string(i) + "] != prefix_sums[" +
                           std::to_string(i - 1) + "] + x_vals[" + std::to_string(i) + "]");
  }
}

Trajectory simulate_direct(std::uint64_t n, RngStream& rng, std::optional<ChainState> start) {
  if (n == 0) throw std::invalid_argument("simulate_direct: n must be positive");
  if (n > kMaxTrajectoryLength)
    throw std::invalid_argument("simulate_direct: n exceeds the trajectory cap of 10^7");
  Trajectory t;
  t.seed = {rng.master_seed(), rng.stream_index()};
  t.states.resize(n + 1);
  t.x_vals.resize(n + 1);
  t.prefix_sums.resize(n + 1);
  ChainState x = start ? *start : chain::sample_stationary(rng);
  t.states[0] = x.x;
  t.x_vals[0] = sign(x.x);
  t.prefix_sums[0] = 0.0;
  for (std::uint64_t i = 1; i <= n; ++i) {
    x = chain::step(x, rng);
    t.states[i] = x.x;
    t.x_vals[i] = sign(x.x);
    t.prefix_sums[i] = t.prefix_sums[i - 1] + t.x_vals[i];
  }
  return t;
}

std::uint64_t sample_holding_time(double a, RngStream& rng) noexcept {
  constexpr auto kNever = std::numeric_limits<std::uint64_t>::max();
  if (a >= 1.0) return 1;
  if (a <= 0.0) return kNever;
  const double v = std::ceil(std::log(rng.uniform_open()) / std::log1p(-a));
  if (!(v < 1.8e19)) return kNever;
  return v < 1.0 ? 1 : static_cast<std::uint64_t>(v);
}

RegenBlock sample_block(RngStream& rng) noexcept {
  const ChainState atom = chain::sample_nu(rng);
  const std::uint64_t tau = sample_holding_time(atom.magnitude(), rng);
  return {tau, atom, static_cast<double>(tau) * sign(atom.x)};
}

RegenPath simulate_regen_path(std::uint64_t n, std::span<const std::uint64_t> checkpoints,
                              RngStream& rng, std::optional<ChainState> start) {
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] > n || (i > 0 && checkpoints[i] < checkpoints[i - 1]))
      throw std::invalid_argument("simulate_regen_path: checkpoints must be sorted and <= n");
  }
  RegenPath out;
  out.sums.resize(checkpoints.size());
  out.running_max.resize(checkpoints.size());

  ChainState x = start ? *start : chain::sample_stationary(rng);
  std::uint64_t pos = 0;  // last index whose X has been accumulated
  double s = 0.0;
  double peak = 0.0;
  std::size_t c = 0;
  // xi_0 itself is not summed, so the starting state covers one index
  // fewer than its holding time.
  bool first = true;
  for (;;) {
    const std::uint64_t hold = sample_holding_time(x.magnitude(), rng);
    const std::uint64_t seg = first ? hold - 1 : hold;
    first = false;
    const std::uint64_t end = seg >= n - pos ? n : pos + seg;
    const double sg = sign(x.x);
    // S is monotone inside a segment, so the running max only needs the
    // segment endpoints.
    while (c < checkpoints.size() && checkpoints[c] <= end) {
      const double sc = s + sg * static_cast<double>(checkpoints[c] - pos);
      out.sums[c] = sc;
      out.running_max[c] = std::max(peak, std::abs(sc));
      ++c;
    }
    s += sg * static_cast<double>(end - pos);
    peak = std::max(peak, std::abs(s));
    pos = end;
    if (pos >= n) break;
    x = chain::sample_nu(rng);
    ++out.regenerations;
  }
  return out;
}

std::vector<std::uint64_t> grid_indices(std::uint64_t n, std::span<const double> t_grid) {
  std::vector<std::uint64_t> idx;
  idx.reserve(t_grid.size());
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    if (!(t > 0.0 && t <= 1.0))
      throw std::invalid_argument("grid point " + report::format_double(t) + " out of (0,1]");
    if (i > 0 && t < t_grid[i - 1]) throw std::invalid_argument("t grid must be sorted");
    idx.push_back(std::min(n, static_cast<std::uint64_t>(std::floor(nd * t * (1.0 + 1e-12)))));
  }
  return idx;
}

std::vector<double> simulate_regen_sum(std::uint64_t n, std::span<const double> t_grid,
                                       RngStream& rng, std::optional<ChainState> start) {
  if (n == 0) throw std::invalid_argument("simulate_regen_sum: n must be positive");
  const auto idx = grid_indices(n, t_grid);
  return simulate_regen_path(n, idx, rng, start).sums;
}

void save_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  validate(traj);
  if (traj.length() > kMaxTrajectoryLength)
    throw std::invalid_argument("save_trajectory: path longer than the 10^7 cap");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw report::IoError("cannot open " + path.string() + " for writing");
  out << "# master_seed=" << traj.seed.master_seed << " stream_index=" << traj.seed.stream_index
      << '\n';
  out << "i,xi,X,S\n";
  out << "0," << report::format_double(traj.states[0]) << ",,\n";
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    out << i << ',' << report::format_double(traj.states[i]) << ','
        << report::format_double(traj.x_vals[i]) << ','
        << report::format_double(traj.prefix_sums[i]) << '\n';
  }
  if (!out) throw report::IoError("write failed for " + path.string());
}

namespace {

SeedSpec parse_seed_comment(const std::vector<std::string>& comments) {
  SeedSpec seed;
  for (const auto& c : comments) {
    std::istringstream in(c);
    std::string tok;
    while (in >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      std::uint64_t v = 0;
      if (!report::parse_uint(std::string_view(tok).substr(eq + 1), v)) continue;
      if (tok.compare(0, eq, "master_seed") == 0) seed.master_seed = v;
      if (tok.compare(0, eq, "stream_index") == 0) seed.stream_index = v;
    }
  }
  return seed;
}

}  // namespace

Trajectory load_trajectory(const std::filesystem::path& path) {
  const report::CsvTable table = report::read_csv(path);
  const std::string file = path.string();
  const std::size_t header_line = table.comments.size() + 1;
  const std::vector<std::string> expected{"i", "xi", "X", "S"};
  if (table.header != expected)
    throw report::ParseError(file, header_line, 1, "expected header i,xi,X,S");
  if (table.rows.empty()) throw report::ParseError(file, header_line + 1, 1, "no rows after header");
  if (table.rows.size() > kMaxTrajectoryLength + 1)
    throw report::ParseError(file, table.lines.back(), 1, "trajectory longer than the 10^7 cap");

  Trajectory t;
  t.seed = parse_seed_comment(table.comments);
  const std::size_t m = table.rows.size();
  t.states.resize(m);
  t.x_vals.resize(m);
  t.prefix_sums.resize(m);
  for (std::size_t r = 0; r < m; ++r) {
    const auto& f = table.rows[r];
    const std::size_t line = table.lines[r];
    std::uint64_t idx = 0;
    if (!report::parse_uint(f[0], idx) || idx != r)
      throw report::ParseError(file, line, 1, "expected index " + std::to_string(r));
    if (!report::parse_double(f[1], t.states[r]))
      throw report::ParseError(file, line, 2, "malformed number '" + f[1] + "'");
    if (r == 0) {
      if (!f[2].empty() || !f[3].empty())
        throw report::ParseError(file, line, f[2].empty() ? 4 : 3, "row 0 must leave X and S empty");
      t.x_vals[0] = sign(t.states[0]);
      t.prefix_sums[0] = 0.0;
      continue;
    }
    if (!report::parse_double(f[2], t.x_vals[r]))
      throw report::ParseError(file, line, 3, "malformed number '" + f[2] + "'");
    if (!report::parse_double(f[3], t.prefix_sums[r]))
      throw report::ParseError(file, line, 4, "malformed number '" + f[3] + "'");
  }
  validate(t);
  return t;
}

}  // namespace revclt::sim
