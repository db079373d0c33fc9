#pragma once

#include <cstddef>
#include <cstdint>

namespace secmacc {

/// <x>_K: x mod K mapped into 1..K (K when x is a multiple of K).
constexpr std::size_t cyclic_index(std::int64_t x, std::int64_t K) {
  const std::int64_t r = ((x % K) + K) % K;
  return static_cast<std::size_t>(r == 0 ? K : r);
}

}  // namespace secmacc
