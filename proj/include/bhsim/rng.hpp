// rng.hpp — seedable, platform-independent random number generation.
//
// Disorder realizations must be bit-reproducible across platforms, so we do
// not use <random> distributions (their output is implementation-defined).
// The generator is xoshiro256** seeded through SplitMix64; uniform doubles
// take the top 53 bits of each output word.
//
// Substream convention: realization r of a sweep draws from a generator
// seeded with `substream_seed(master, r)`.

#pragma once

#include <array>
#include <cstdint>

namespace bhsim {

struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  SplitMix64 sm(master ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  return sm.next();
}

class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next() {
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

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [-w, w].  Exactly +0.0 when w == 0 so that a zero-width
  // disorder draw leaves matrix entries bit-identical to the clean case.
  double uniform_symmetric(double half_width) {
    if (half_width == 0.0) {
      next();  // keep the stream position independent of the width
      return 0.0;
    }
    return half_width * (2.0 * uniform() - 1.0);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace bhsim
