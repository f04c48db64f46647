#pragma once

#include <cstdint>
#include <random>

namespace eahm {

// Deterministic random source.  Same seed => same stream on every platform;
// uniforms are built from the top 53 bits of an mt19937_64 draw and are
// strictly inside (0, 1), so logs and quantile transforms are always finite.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform01() {
    const std::uint64_t bits = gen_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t next_u64() { return gen_(); }

private:
  std::mt19937_64 gen_;
};

}  // namespace eahm
