#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace egw {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123), exposed as
/// a UniformRandomBitGenerator. The stream is fully determined by the 64-bit
/// seed (the key) and a 64-bit stream id (the high counter words), so results
/// are identical on every platform.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept
      : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
        counter_{0, 0, std::uint32_t(stream), std::uint32_t(stream >> 32)} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (index_ == 4) {
      block_ = generate(counter_, key_);
      increment();
      index_ = 0;
    }
    return block_[index_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept {
    const std::uint64_t hi = (*this)() >> 5;
    const std::uint64_t lo = (*this)() >> 6;
    return double(hi * 67108864ull + lo) * (1.0 / 9007199254740992.0);
  }

  void discard(std::uint64_t n) noexcept {
    for (; n > 0; --n) (*this)();
  }

  /// The raw bijection: ten rounds of Philox on one counter block.
  static constexpr Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t(0xD2511F53u) * ctr[0];
      const std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * ctr[2];
      ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
             std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
    }
    return ctr;
  }

 private:
  void increment() noexcept {
    if (++counter_[0] == 0 && ++counter_[1] == 0 && ++counter_[2] == 0) ++counter_[3];
  }

  Key key_;
  Counter counter_;
  Counter block_{};
  int index_ = 4;
};

/// SplitMix64 finalizer; derives independent child seeds from a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t offset) noexcept {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (offset + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace egw
