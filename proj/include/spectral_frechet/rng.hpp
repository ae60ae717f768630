#pragma once

#include <cstdint>
#include <string_view>

namespace spectral_frechet {

/// Seed for any sampler in this library. Identical seed and parameters
/// reproduce the sampled graph bit for bit, independent of platform,
/// iteration order and thread count.
struct RngSeed {
  std::uint64_t value = 0;
};

namespace rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 output mix (Stafford mix13). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

/// k-th output of the SplitMix64 stream started at `seed`. Random access into
/// the stream is what makes per-pair substreams order-independent.
constexpr std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t k) {
  return mix64(seed + (k + 1) * kGolden);
}

/// FNV-1a on a purpose string; folds labels into derived seeds.
constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Maps a 64-bit word to a double in [0, 1) using the top 53 bits.
constexpr double to_unit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// xoshiro256** (Blackman & Vigna), state filled from SplitMix64.
/// Used by the sequential samplers (preferential attachment, rewiring).
class Xoshiro256 {
 public:
  explicit constexpr Xoshiro256(std::uint64_t seed)
      : s_{splitmix64_at(seed, 0), splitmix64_at(seed, 1),
           splitmix64_at(seed, 2), splitmix64_at(seed, 3)} {}

  constexpr std::uint64_t next() {
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

  constexpr double uniform() { return to_unit(next()); }

  /// Unbiased integer in [0, bound) via bitmask rejection.
  constexpr std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t mask = mask_for(bound - 1);
    for (;;) {
      const std::uint64_t x = next() & mask;
      if (x < bound) return x;
    }
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  static constexpr std::uint64_t mask_for(std::uint64_t v) {
    std::uint64_t m = v;
    m |= m >> 1;
    m |= m >> 2;
    m |= m >> 4;
    m |= m >> 8;
    m |= m >> 16;
    m |= m >> 32;
    return m;
  }
  std::uint64_t s_[4];
};

}  // namespace rng

/// Sub-seed for (root, purpose, index). All CLI randomness funnels through a
/// single root seed; everything derived is reproducible from the manifest.
constexpr std::uint64_t derive_seed(RngSeed root, std::string_view purpose,
                                    std::uint64_t index) {
  return rng::splitmix64_at(rng::mix64(root.value ^ rng::fnv1a(purpose)), index);
}

}  // namespace spectral_frechet
