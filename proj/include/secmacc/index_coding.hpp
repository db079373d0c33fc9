#pragma once

// Single unicast index coding with symmetric, consecutive side information.
// Receiver k wants message k and is missing the U messages before it and
// the D messages after it (cyclically); it knows all the others. Encoding
// with a K x (U+D+1) AIR matrix gives a code of length U+D+1.
//
// All positions are 1-based.

#include "secmacc/bits.hpp"
#include "secmacc/cyclic.hpp"
#include "secmacc/error.hpp"
#include "secmacc/gf2.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace secmacc {

struct SuicpInstance {
  std::size_t K = 0;
  std::size_t U = 0;
  std::size_t D = 0;
  std::vector<BitVector> messages;
};

namespace detail {
inline void check_suicp(std::size_t K, std::size_t U, std::size_t D) {
  if (U + D >= K)
    throw Error(Errc::ParamError, "need U + D < K, got U=" + std::to_string(U) + " D=" + std::to_string(D) +
                                      " K=" + std::to_string(K));
}
}  // namespace detail

inline std::size_t code_length(std::size_t K, std::size_t U, std::size_t D) {
  detail::check_suicp(K, U, D);
  return U + D + 1;
}

/// Positions receiver k does not know, in cyclic order from <k-U>_K to <k+D>_K.
inline std::vector<std::size_t> unknown_positions(std::size_t K, std::size_t U, std::size_t D, std::size_t k) {
  detail::check_suicp(K, U, D);
  std::vector<std::size_t> out;
  const auto kk = static_cast<std::int64_t>(k);
  for (std::int64_t off = -static_cast<std::int64_t>(U); off <= static_cast<std::int64_t>(D); ++off)
    out.push_back(cyclic_index(kk + off, static_cast<std::int64_t>(K)));
  return out;
}

/// Side-information window of receiver k: <k+D+1>_K .. <k-U-1>_K.
inline std::vector<std::size_t> side_info_positions(std::size_t K, std::size_t U, std::size_t D, std::size_t k) {
  detail::check_suicp(K, U, D);
  std::vector<std::size_t> out;
  const auto kk = static_cast<std::int64_t>(k);
  for (std::size_t t = 0; t < K - (U + D + 1); ++t)
    out.push_back(cyclic_index(kk + static_cast<std::int64_t>(D + 1 + t), static_cast<std::int64_t>(K)));
  return out;
}

inline std::vector<BitVector> encode(std::size_t K, std::size_t U, std::size_t D,
                                     std::span<const BitVector> messages) {
  const std::size_t len = code_length(K, U, D);
  if (messages.size() != K) throw Error(Errc::LengthMismatch, "expected " + std::to_string(K) + " messages");
  const std::size_t bits = messages.front().size();
  for (const auto& m : messages)
    if (m.size() != bits) throw Error(Errc::LengthMismatch, "messages differ in length");
  return multiply_blocks(messages, build_air(K, len).matrix(), bits);
}

inline std::vector<BitVector> encode(const SuicpInstance& inst) {
  return encode(inst.K, inst.U, inst.D, inst.messages);
}

/// Recovers message k from the codeword and the receiver's side information.
inline BitVector decode_receiver(std::span<const BitVector> codeword, const std::map<std::size_t, BitVector>& side_info,
                                 std::size_t k, std::size_t K, std::size_t U, std::size_t D) {
  const std::size_t len = code_length(K, U, D);
  if (k < 1 || k > K) throw Error(Errc::IndexError, "receiver index out of range");
  if (codeword.size() != len)
    throw Error(Errc::LengthMismatch, "codeword has " + std::to_string(codeword.size()) + " symbols, expected " +
                                          std::to_string(len));

  const auto window = side_info_positions(K, U, D, k);
  if (side_info.size() != window.size())
    throw Error(Errc::SideInfoMismatch, "receiver " + std::to_string(k) + " holds " +
                                            std::to_string(side_info.size()) + " messages, expected " +
                                            std::to_string(window.size()));
  for (std::size_t pos : window)
    if (!side_info.contains(pos))
      throw Error(Errc::SideInfoMismatch, "side information lacks position " + std::to_string(pos));

  const auto& air = build_air(K, len);
  const std::size_t bits = codeword.front().size();
  std::vector<BitVector> residual(codeword.begin(), codeword.end());
  for (const auto& [pos, msg] : side_info) {
    if (msg.size() != bits) throw Error(Errc::LengthMismatch, "side information length differs from symbols");
    for (std::size_t c = 0; c < len; ++c)
      if (air.matrix().get(pos - 1, c)) residual[c] ^= msg;
  }

  // residual = y * S with S the window of rows starting at <k-U>_K, so
  // S^T y^T = residual^T.
  const std::size_t first = cyclic_index(static_cast<std::int64_t>(k) - static_cast<std::int64_t>(U),
                                         static_cast<std::int64_t>(K));
  const BitMatrix system = air.window(first - 1).transpose();
  std::vector<BitVector> unknowns;
  try {
    unknowns = solve_blocks(system, residual);
  } catch (const Error& e) {
    throw Error(Errc::DecodeFailure, std::string("AIR window unexpectedly singular: ") + e.what());
  }
  return unknowns[U];
}

}  // namespace secmacc
