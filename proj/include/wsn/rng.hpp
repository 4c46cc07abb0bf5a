#pragma once

#include <cstdint>
#include <string_view>

namespace wsn {

// splitmix64 (Vigna). Used to expand seeds and to derive per-run streams.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

/// xoshiro256** 1.0 (Blackman & Vigna). Pinned by its constants so that a
/// given seed reproduces the identical stream on every platform and in any
/// reimplementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform integer in [0, bound) via the multiply-shift reduction
  /// (Lemire); bound must be nonzero.
  std::uint32_t below(std::uint32_t bound) {
    const std::uint32_t x = static_cast<std::uint32_t>(next_u64() >> 32);
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(x) * bound) >> 32);
  }

  /// Uniform double in [0, 1) with 53 random mantissa bits.
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

/// Order-sensitive seed combinator: mix_seed(a, b) != mix_seed(b, a) in
/// general. Chaining it over labels and indices yields independent
/// sub-streams from one master seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  SplitMix64 sm(a ^ (b * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull));
  return sm.next();
}

/// FNV-1a over a label, for naming derived seed streams.
inline std::uint64_t label_hash(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace wsn
