#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace drpr {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// The 64-bit seed is the key. The 128-bit counter is split into a 64-bit
// block index and a 64-bit stream id, so `Philox(seed, r)` for distinct r are
// independent, reproducible streams. All derived draws below use only integer
// arithmetic, so sequences are identical across platforms and standard
// libraries (unlike std::uniform_*_distribution).
class Philox {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (lane_ == 2) {
      const Block out = encrypt(
          {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
           static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
          key_);
      buffer_[0] = static_cast<std::uint64_t>(out[0]) | (static_cast<std::uint64_t>(out[1]) << 32);
      buffer_[1] = static_cast<std::uint64_t>(out[2]) | (static_cast<std::uint64_t>(out[3]) << 32);
      ++block_;
      lane_ = 0;
    }
    return buffer_[lane_++];
  }

  /// Independent generator on another stream under the same key.
  Philox split(std::uint64_t stream) const {
    return Philox(static_cast<std::uint64_t>(key_[0]) | (static_cast<std::uint64_t>(key_[1]) << 32),
                  stream);
  }

  std::uint64_t stream() const { return stream_; }

  /// Raw ten-round bijection; exposed for known-answer tests.
  static constexpr Block encrypt(Block ctr, Key key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

  friend bool operator==(const Philox& a, const Philox& b) {
    return a.key_ == b.key_ && a.stream_ == b.stream_ && a.block_ == b.block_ &&
           a.lane_ == b.lane_;
  }

 private:
  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int lane_ = 2;
};

/// Unbiased integer in [0, bound) (Lemire's multiply-shift with rejection).
template <typename Engine>
std::uint64_t uniform_index(Engine& rng, std::uint64_t bound) {
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
template <typename Engine>
double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename Engine>
bool bernoulli(Engine& rng, double p) {
  return uniform01(rng) < p;
}

}  // namespace drpr
