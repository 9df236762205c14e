#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "chain_model.hpp"
#include "rng.hpp"

namespace revclt::sim {

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// Largest path a Trajectory may hold; longer runs go through the
/// regeneration sampler, which stores nothing.
inline constexpr std::uint64_t kMaxTrajectoryLength = 10'000'000;

/// A realized path xi_0..xi_n. All three arrays have n + 1 entries:
/// x_vals[i] = sign(xi_i) (x_vals[0] is X_0, which is not part of any
/// partial sum) and prefix_sums[i] = S_i with S_0 = 0.
struct Trajectory {
  SeedSpec seed;
  std::vector<double> states;
  std::vector<double> x_vals;
  std::vector<double> prefix_sums;

  std::uint64_t length() const noexcept { return states.empty() ? 0 : states.size() - 1; }
  chain::ChainState state(std::size_t i) const noexcept { return {states[i]}; }
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds X and S from a list of states and checks the state-space bound.
Trajectory trajectory_from_states(std::vector<double> states, SeedSpec seed = {});

/// Throws InvariantError naming the first violated index.
void validate(const Trajectory& traj);

/// xi_0 ~ pi (or the given start), then n chain steps.
Trajectory simulate_direct(std::uint64_t n, RngStream& rng,
                           std::optional<chain::ChainState> start = std::nullopt);

/// Number of steps until the chain leaves a state with |x| = a:
/// P(L > m) = (1 - a)^m, sampled as ceil(ln u / ln(1 - a)). a = 0 never
/// leaves and returns the maximum representable value.
std::uint64_t sample_holding_time(double a, RngStream& rng) noexcept;

/// One regeneration cycle: a fresh nu atom, its holding length and the
/// block sum tau * sign(atom).
struct RegenBlock {
  std::uint64_t tau;
  chain::ChainState atom;
  double y;
};

RegenBlock sample_block(RngStream& rng) noexcept;

/// Output of the block-wise sampler at the requested indices.
struct RegenPath {
  std::vector<double> sums;         ///< S_k at each checkpoint k
  std::vector<double> running_max;  ///< max_{j <= k} |S_j| at each checkpoint
  std::uint64_t regenerations = 0;  ///< jump epochs in 1..n
};

/// Walks the chain one holding segment at a time: a state with |x| = a
/// contributes sign(x) for a geometric number of indices, then a fresh nu
/// atom takes over. Storage is O(checkpoints). `checkpoints` must be
/// non-decreasing and each <= n; index 0 is allowed (S_0 = 0).
RegenPath simulate_regen_path(std::uint64_t n, std::span<const std::uint64_t> checkpoints,
                              RngStream& rng,
                              std::optional<chain::ChainState> start = std::nullopt);

/// Grid indices [n t] for t in (0, 1]; throws for unsorted or out-of-range t.
std::vector<std::uint64_t> grid_indices(std::uint64_t n, std::span<const double> t_grid);

/// S_{[nt]} for every t in the grid, from the regeneration sampler.
std::vector<double> simulate_regen_sum(std::uint64_t n, std::span<const double> t_grid,
                                       RngStream& rng,
                                       std::optional<chain::ChainState> start = std::nullopt);

/// CSV with header `i,xi,X,S`; row 0 carries xi_0 with empty X and S.
void save_trajectory(const Trajectory& traj, const std::filesystem::path& path);

/// Parses and re-validates; throws report::ParseError or InvariantError.
Trajectory load_trajectory(const std::filesystem::path& path);

}  // namespace revclt::sim
