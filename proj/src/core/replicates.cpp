#include "replicates.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "summation.hpp"

namespace revclt::sim {

MonteCarloEstimate make_estimate(double mean, double std_error, std::uint64_t reps,
                                 std::uint64_t master_seed) {
  return {mean,
          std_error,
          reps,
          mean - MonteCarloEstimate::kZ99 * std_error,
          mean + MonteCarloEstimate::kZ99 * std_error,
          master_seed};
}

MonteCarloEstimate estimate(std::span<const double> sample, std::uint64_t master_seed) {
  if (sample.size() < 2) throw std::invalid_argument("estimate: need at least two values");
  const double n = static_cast<double>(sample.size());
  const double mean = pairwise_sum(sample) / n;
  std::vector<double> sq(sample.size());
  std::transform(sample.begin(), sample.end(), sq.begin(),
                 [mean](double x) { return (x - mean) * (x - mean); });
  const double var = pairwise_sum(sq) / (n - 1.0);
  return make_estimate(mean, std::sqrt(var / n), sample.size(), master_seed);
}

void RunningStats::push(double x) noexcept {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) noexcept {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double delta = other.mean_ - mean_;
  const double total = na + nb;
  mean_ += delta * nb / total;
  m2_ += other.m2_ + delta * delta * na * nb / total;
  n_ += other.n_;
}

MonteCarloEstimate RunningStats::to_estimate(std::uint64_t master_seed) const {
  return make_estimate(mean_, std::sqrt(variance() / static_cast<double>(n_)), n_, master_seed);
}

std::vector<double> SampleMatrix::column(std::size_t j) const {
  std::vector<double> out(reps_);
  for (std::size_t i = 0; i < reps_; ++i) out[i] = (*this)(i, j);
  return out;
}

unsigned resolve_threads(unsigned requested) noexcept {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_chunks(std::size_t count, std::size_t chunk, unsigned threads,
                     const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t nchunks = (count + chunk - 1) / chunk;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), nchunks));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t c = next.fetch_add(1);
      if (c >= nchunks) return;
      try {
        body(c * chunk, std::min(count, (c + 1) * chunk));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };

  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace revclt::sim
