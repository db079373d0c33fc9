#pragma once

#include <cstdint>

namespace secmacc {

/// Purpose tags separating independent random streams drawn from one seed.
enum class StreamTag : std::uint64_t {
  File = 1,
  Key = 2,
  Demand = 3,
  Sample = 4,
};

/// Counter-based generator: word c of stream (seed, tag, id) is a pure
/// function of those four values, so streams never depend on draw order
/// elsewhere in the program.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, StreamTag tag, std::uint64_t id)
      : key_(mix(mix(seed ^ 0x6a09e667f3bcc908ULL) ^ static_cast<std::uint64_t>(tag)) ^
             mix(id + 0x3c6ef372fe94f82bULL)) {}

  std::uint64_t next() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform value in [0, bound), bound > 0, by rejection.
  std::uint64_t uniform(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % bound;
  }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace secmacc
