#pragma once

#include <cstdint>

namespace pemfc {

// Deterministic counter RNG with independent per-stream substreams (splitmix64
// finalizer over a Weyl sequence). Stream k of a given seed produces the same
// draws regardless of how many values other streams consumed, which makes
// per-scenario sampling reproducible and order-independent.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : state_(finalize(seed ^ finalize(stream * kGolden + 0x6A09E667F3BCC909ull))) {}

  std::uint64_t next64() {
    state_ += kGolden;
    return finalize(state_);
  }

  // Uniform in [0, 1), 53 random bits.
  double u01() { return static_cast<double>(next64() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  static std::uint64_t finalize(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace pemfc
