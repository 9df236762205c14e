#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace revclt {

/// Counter-based random stream built on Philox4x32-10.
///
/// The output is a pure function of (master_seed, stream_index, draw
/// counter): the master seed is the Philox key and the stream index fills
/// the upper half of the 128-bit counter. Two streams with the same pair
/// reproduce each other bit for bit; distinct pairs never share a
/// (key, counter) input.
class RngStream {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
      : key_{static_cast<std::uint32_t>(master_seed),
             static_cast<std::uint32_t>(master_seed >> 32)},
        master_seed_(master_seed),
        stream_index_(stream_index) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (buffered_ == 0) refill();
    --buffered_;
    return buffer_[buffered_];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  /// Raw Philox4x32-10 bijection, exposed for known-answer tests.
  static Block philox(Block counter, Key key) noexcept {
    constexpr std::uint32_t kMulA = 0xD2511F53u;
    constexpr std::uint32_t kMulB = 0xCD9E8D57u;
    constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    constexpr std::uint32_t kWeylB = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kMulA} * counter[0];
      const std::uint64_t p1 = std::uint64_t{kMulB} * counter[2];
      counter = {static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
                 static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
                 static_cast<std::uint32_t>(p0)};
      key[0] += kWeylA;
      key[1] += kWeylB;
    }
    return counter;
  }

 private:
  void refill() noexcept {
    const Block ctr{static_cast<std::uint32_t>(block_),
                    static_cast<std::uint32_t>(block_ >> 32),
                    static_cast<std::uint32_t>(stream_index_),
                    static_cast<std::uint32_t>(stream_index_ >> 32)};
    const Block out = philox(ctr, key_);
    ++block_;
    // Served in reverse order by operator().
    buffer_[1] = (std::uint64_t{out[1]} << 32) | out[0];
    buffer_[0] = (std::uint64_t{out[3]} << 32) | out[2];
    buffered_ = 2;
  }

  Key key_;
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace revclt
