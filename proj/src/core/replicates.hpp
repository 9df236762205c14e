#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

namespace revclt::sim {

/// Mean, standard error and 99% normal confidence interval of a replicate
/// sample.
struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t reps = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t master_seed = 0;

  static constexpr double kZ99 = 2.576;

  /// |mean - target| <= k * std_error.
  bool within(double target, double k) const noexcept {
    return std::abs(mean - target) <= k * std_error;
  }
};

MonteCarloEstimate make_estimate(double mean, double std_error, std::uint64_t reps,
                                 std::uint64_t master_seed);

/// Estimate from a replicate sample: pairwise-summed mean, two-pass sample
/// variance, std_error = sd / sqrt(reps). Requires at least two values.
MonteCarloEstimate estimate(std::span<const double> sample, std::uint64_t master_seed);

/// Streaming mean/variance (Welford) with an exact parallel merge.
class RunningStats {
 public:
  void push(double x) noexcept;
  void merge(const RunningStats& other) noexcept;

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Sample variance with n - 1 denominator; 0 for fewer than two values.
  double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  MonteCarloEstimate to_estimate(std::uint64_t master_seed) const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// A replicate failed; carries the replicate index and the original message.
class ReplicateFailure : public std::runtime_error {
 public:
  ReplicateFailure(std::uint64_t replicate, const std::string& what)
      : std::runtime_error("replicate " + std::to_string(replicate) + ": " + what),
        replicate_(replicate) {}
  std::uint64_t replicate() const noexcept { return replicate_; }

 private:
  std::uint64_t replicate_;
};

struct ReplicateOptions {
  std::uint64_t master_seed = 0;
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

/// reps x width row-major sample matrix, one row per replicate.
class SampleMatrix {
 public:
  SampleMatrix(std::size_t reps, std::size_t width)
      : reps_(reps), width_(width), data_(reps * width) {}

  std::size_t reps() const noexcept { return reps_; }
  std::size_t width() const noexcept { return width_; }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * width_, width_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * width_, width_};
  }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * width_ + j]; }
  std::vector<double> column(std::size_t j) const;

 private:
  std::size_t reps_;
  std::size_t width_;
  std::vector<double> data_;
};

/// Runs body(begin, end) over [0, count) in fixed-size chunks on a worker
/// pool. The first exception thrown by any chunk is rethrown after all
/// workers stop.
void parallel_chunks(std::size_t count, std::size_t chunk, unsigned threads,
                     const std::function<void(std::size_t, std::size_t)>& body);

unsigned resolve_threads(unsigned requested) noexcept;

/// Executes task(rng, out_row) for replicate i on stream (master_seed, i).
/// Every row depends only on its stream, so the matrix is identical for any
/// thread count.
template <class Task>
SampleMatrix run_replicates(std::size_t reps, std::size_t width, const ReplicateOptions& opt,
                            Task&& task) {
  if (reps < 2) throw std::invalid_argument("run_replicates: reps must be at least 2");
  SampleMatrix out(reps, width);
  parallel_chunks(reps, 256, opt.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      RngStream rng(opt.master_seed, i);
      try {
        task(rng, out.row(i));
      } catch (const std::exception& e) {
        throw ReplicateFailure(i, e.what());
      }
    }
  });
  return out;
}

/// Streaming variant: reduces task(rng) -> double into RunningStats. Chunks
/// have a fixed size and are merged in index order, so the result does not
/// depend on the thread count.
template <class Task>
RunningStats reduce_replicates(std::size_t reps, const ReplicateOptions& opt, Task&& task) {
  if (reps < 2) throw std::invalid_argument("reduce_replicates: reps must be at least 2");
  constexpr std::size_t kChunk = 4096;
  std::vector<RunningStats> partial((reps + kChunk - 1) / kChunk);
  parallel_chunks(reps, kChunk, opt.threads, [&](std::size_t begin, std::size_t end) {
    RunningStats& acc = partial[begin / kChunk];
    for (std::size_t i = begin; i < end; ++i) {
      RngStream rng(opt.master_seed, i);
      try {
        acc.push(task(rng));
      } catch (const std::exception& e) {
        throw ReplicateFailure(i, e.what());
      }
    }
  });
  RunningStats total;
  for (const auto& p : partial) total.merge(p);
  return total;
}

}  // namespace revclt::sim
