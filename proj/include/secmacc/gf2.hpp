#pragma once

#include "secmacc/bits.hpp"
#include "secmacc/error.hpp"

#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace secmacc {

/// Rank over the binary field.
inline std::size_t rank(const BitMatrix& mat) {
  std::vector<BitVector> rows;
  rows.reserve(mat.rows());
  for (std::size_t r = 0; r < mat.rows(); ++r) rows.push_back(mat.row(r));
  std::size_t rank = 0;
  for (std::size_t c = 0; c < mat.cols() && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && !rows[pivot].get(c)) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r)
      if (rows[r].get(c)) rows[r] ^= rows[rank];
    ++rank;
  }
  return rank;
}

/// Solves mat * x = rhs where every unknown and every right-hand side entry
/// is itself a block of bits (all blocks the same length). Equation r reads
/// XOR_{c : mat[r][c] = 1} x[c] = rhs[r].
inline std::vector<BitVector> solve_blocks(const BitMatrix& mat, std::span<const BitVector> rhs) {
  const std::size_t n = mat.rows();
  if (mat.cols() != n) throw Error(Errc::ShapeError, "solve needs a square matrix");
  if (rhs.size() != n) throw Error(Errc::ShapeError, "right-hand side has wrong number of entries");
  for (const auto& b : rhs)
    if (b.size() != (n ? rhs[0].size() : 0)) throw Error(Errc::LengthMismatch, "right-hand side blocks differ in length");

  std::vector<BitVector> a;
  std::vector<BitVector> b(rhs.begin(), rhs.end());
  a.reserve(n);
  for (std::size_t r = 0; r < n; ++r) a.push_back(mat.row(r));

  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && !a[pivot].get(c)) ++pivot;
    if (pivot == n)
      throw Error(Errc::SingularMatrix, "matrix is singular (no pivot in column " + std::to_string(c) + ")");
    std::swap(a[c], a[pivot]);
    std::swap(b[c], b[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r != c && a[r].get(c)) {
        a[r] ^= a[c];
        b[r] ^= b[c];
      }
    }
  }
  return b;
}

inline BitVector solve(const BitMatrix& mat, const BitVector& rhs) {
  if (rhs.size() != mat.rows()) throw Error(Errc::ShapeError, "right-hand side length differs from row count");
  std::vector<BitVector> blocks;
  blocks.reserve(rhs.size());
  for (std::size_t r = 0; r < rhs.size(); ++r) blocks.push_back(BitVector::from_bits({rhs.get(r) ? 1 : 0}));
  const auto x = solve_blocks(mat, blocks);
  BitVector out(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) out.set(c, x[c].get(0));
  return out;
}

/// Row-vector times matrix over blocks: out[c] = XOR_{r : mat[r][c] = 1} x[r].
inline std::vector<BitVector> multiply_blocks(std::span<const BitVector> x, const BitMatrix& mat,
                                              std::size_t block_len) {
  if (x.size() != mat.rows()) throw Error(Errc::ShapeError, "vector length differs from row count");
  std::vector<BitVector> out(mat.cols(), BitVector(block_len));
  for (std::size_t r = 0; r < mat.rows(); ++r) {
    if (x[r].size() != block_len) throw Error(Errc::LengthMismatch, "block length mismatch");
    for (std::size_t c = 0; c < mat.cols(); ++c)
      if (mat.get(r, c)) out[c] ^= x[r];
  }
  return out;
}

/// True iff every window of cols() cyclically adjacent rows has full rank.
inline bool verify_air(const BitMatrix& mat) {
  if (mat.cols() == 0 || mat.rows() < mat.cols())
    throw Error(Errc::ShapeError, "AIR check needs rows >= cols >= 1, got " + std::to_string(mat.rows()) + "x" +
                                      std::to_string(mat.cols()));
  for (std::size_t s = 0; s < mat.rows(); ++s)
    if (rank(mat.cyclic_window(s, mat.cols())) != mat.cols()) return false;
  return true;
}

/// A zero-one matrix certified to have the adjacent-independent-rows
/// property. Only obtainable through certify() or build_air().
class AirMatrix {
 public:
  static AirMatrix certify(BitMatrix mat) {
    if (!verify_air(mat)) throw Error(Errc::ShapeError, "matrix fails the adjacent independent rows check");
    return AirMatrix(std::move(mat));
  }

  const BitMatrix& matrix() const& noexcept { return mat_; }
  BitMatrix matrix() && noexcept { return std::move(mat_); }
  std::size_t rows() const noexcept { return mat_.rows(); }
  std::size_t cols() const noexcept { return mat_.cols(); }
  bool verified() const noexcept { return true; }

  /// Square block of cols() rows starting at `start` (0-based, cyclic).
  BitMatrix window(std::size_t start) const { return mat_.cyclic_window(start, mat_.cols()); }

 private:
  explicit AirMatrix(BitMatrix mat) : mat_(std::move(mat)) {}
  BitMatrix mat_;
};

namespace detail {

// Rows as bit masks, column c at bit c.
inline std::vector<std::uint64_t> air_rows(std::size_t m, std::size_t n) {
  std::vector<std::uint64_t> rows;
  rows.reserve(m);
  const std::size_t copies = m / n;
  for (std::size_t q = 0; q < copies; ++q)
    for (std::size_t c = 0; c < n; ++c) rows.push_back(std::uint64_t{1} << c);
  const std::size_t rem = m % n;
  if (rem == 0) return rows;

  // Remaining rows are [I_rem | Y] with Y a rem x (n - rem) AIR block,
  // taken directly or as the transpose of an (n - rem) x rem one.
  std::vector<std::uint64_t> tail;
  if (rem >= n - rem) {
    tail = air_rows(rem, n - rem);
  } else {
    const auto tall = air_rows(n - rem, rem);
    tail.assign(rem, 0);
    for (std::size_t r = 0; r < tall.size(); ++r)
      for (std::size_t c = 0; c < rem; ++c)
        if ((tall[r] >> c) & 1U) tail[c] |= std::uint64_t{1} << r;
  }
  for (std::size_t r = 0; r < rem; ++r) rows.push_back((std::uint64_t{1} << r) | (tail[r] << rem));
  return rows;
}

}  // namespace detail

/// Deterministic m x n AIR matrix whose first n rows are the identity.
///
/// Built by Euclid-style recursion: floor(m/n) stacked identities followed
/// by [I_r | Y] where r = m mod n and Y is a smaller AIR block. The result is
/// always passed through the verifier before being returned.
inline AirMatrix build_air(std::size_t m, std::size_t n) {
  if (n == 0 || m < n)
    throw Error(Errc::ShapeError, "AIR construction needs m >= n >= 1, got m=" + std::to_string(m) +
                                      " n=" + std::to_string(n));
  if (n > 64) throw Error(Errc::ShapeError, "AIR construction supports at most 64 columns");

  static std::mutex mutex;
  static std::map<std::pair<std::size_t, std::size_t>, AirMatrix> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find({m, n}); it != cache.end()) return it->second;
  }

  BitMatrix mat(m, n);
  const auto rows = detail::air_rows(m, n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if ((rows[r] >> c) & 1U) mat.set(r, c, true);
  auto air = AirMatrix::certify(std::move(mat));

  std::lock_guard lock(mutex);
  return cache.emplace(std::pair{m, n}, std::move(air)).first->second;
}

}  // namespace secmacc
