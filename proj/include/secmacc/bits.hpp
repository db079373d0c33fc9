#pragma once

#include "secmacc/error.hpp"
#include "secmacc/random.hpp"

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace secmacc {

/// Ordered sequence of binary symbols, packed 64 per word.
///
/// Bit b lives in word b/64 at position b%64. Unused high bits of the last
/// word are always zero, so word-wise comparison is logical comparison.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t len) : len_(len), words_((len + 63) / 64, 0) {}

  static BitVector from_bits(std::initializer_list<int> bits) {
    BitVector v(bits.size());
    std::size_t i = 0;
    for (int b : bits) v.set(i++, b != 0);
    return v;
  }

  /// Parses a string of '0'/'1' characters, first character is bit 0.
  static BitVector from_string(std::string_view s) {
    BitVector v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '0' && s[i] != '1') throw Error(Errc::ParamError, "bit string must hold only 0/1");
      v.set(i, s[i] == '1');
    }
    return v;
  }

  /// Bit b of the result is bit b of value (little-endian), len <= 64.
  static BitVector from_uint(std::uint64_t value, std::size_t len) {
    if (len > 64) throw Error(Errc::LengthMismatch, "from_uint supports at most 64 bits");
    BitVector v(len);
    if (len > 0) v.words_[0] = len == 64 ? value : value & ((std::uint64_t{1} << len) - 1);
    return v;
  }

  static BitVector random(std::size_t len, CounterRng& rng) {
    BitVector v(len);
    for (auto& w : v.words_) w = rng.next();
    v.trim();
    return v;
  }

  std::size_t size() const noexcept { return len_; }
  bool empty() const noexcept { return len_ == 0; }

  bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i, bool value) {
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if (value)
      words_[i / 64] |= mask;
    else
      words_[i / 64] &= ~mask;
  }
  void flip(std::size_t i) { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }

  bool none() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
  }
  std::size_t popcount() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  BitVector& operator^=(const BitVector& other) {
    if (other.len_ != len_) throw Error(Errc::LengthMismatch, "XOR of vectors with different lengths");
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    return *this;
  }
  friend BitVector operator^(BitVector lhs, const BitVector& rhs) {
    lhs ^= rhs;
    return lhs;
  }
  friend bool operator==(const BitVector&, const BitVector&) = default;

  BitVector slice(std::size_t offset, std::size_t len) const {
    if (offset + len > len_) throw Error(Errc::LengthMismatch, "slice out of range");
    BitVector out(len);
    for (std::size_t i = 0; i < len; ++i)
      if (get(offset + i)) out.set(i, true);
    return out;
  }

  void append(const BitVector& tail) {
    const std::size_t base = len_;
    len_ += tail.len_;
    words_.resize((len_ + 63) / 64, 0);
    for (std::size_t i = 0; i < tail.len_; ++i)
      if (tail.get(i)) set(base + i, true);
  }

  /// Value of the first min(size, 64) bits, little-endian.
  std::uint64_t to_uint() const {
    if (len_ > 64) throw Error(Errc::LengthMismatch, "to_uint supports at most 64 bits");
    return words_.empty() ? 0 : words_[0];
  }

  std::string to_string() const {
    std::string s(len_, '0');
    for (std::size_t i = 0; i < len_; ++i)
      if (get(i)) s[i] = '1';
    return s;
  }

  /// Hex rendering of the logical sequence: bits 4h..4h+3 form nibble h,
  /// bit 4h being the most significant; the final nibble is zero-padded.
  std::string to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve((len_ + 3) / 4);
    for (std::size_t h = 0; h * 4 < len_; ++h) {
      unsigned nibble = 0;
      for (std::size_t b = 0; b < 4; ++b) {
        nibble <<= 1;
        const std::size_t i = h * 4 + b;
        if (i < len_ && get(i)) nibble |= 1U;
      }
      s.push_back(digits[nibble]);
    }
    return s;
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

 private:
  void trim() {
    if (len_ % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (len_ % 64)) - 1;
  }

  std::size_t len_ = 0;
  std::vector<std::uint64_t> words_;
};

inline BitVector concat(std::span<const BitVector> parts) {
  BitVector out;
  for (const auto& p : parts) out.append(p);
  return out;
}

/// Splits v into `count` equal consecutive parts.
inline std::vector<BitVector> split_even(const BitVector& v, std::size_t count) {
  if (count == 0 || v.size() % count != 0)
    throw Error(Errc::DivisibilityError,
                std::to_string(v.size()) + " bits do not split into " + std::to_string(count) + " equal parts");
  const std::size_t part = v.size() / count;
  std::vector<BitVector> out;
  out.reserve(count);
  for (std::size_t p = 0; p < count; ++p) out.push_back(v.slice(p * part, part));
  return out;
}

/// Zero-one matrix over the binary field, stored as one BitVector per row.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols) : cols_(cols), data_(rows, BitVector(cols)) {}

  BitMatrix(std::initializer_list<std::initializer_list<int>> rows) {
    cols_ = rows.size() == 0 ? 0 : rows.begin()->size();
    for (const auto& r : rows) {
      if (r.size() != cols_) throw Error(Errc::ShapeError, "ragged matrix literal");
      data_.push_back(BitVector::from_bits(r));
    }
  }

  static BitMatrix identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  static BitMatrix from_rows(std::vector<BitVector> rows, std::size_t cols) {
    for (const auto& r : rows)
      if (r.size() != cols) throw Error(Errc::ShapeError, "row length differs from column count");
    BitMatrix m;
    m.cols_ = cols;
    m.data_ = std::move(rows);
    return m;
  }

  std::size_t rows() const noexcept { return data_.size(); }
  std::size_t cols() const noexcept { return cols_; }

  bool get(std::size_t r, std::size_t c) const { return data_[r].get(c); }
  void set(std::size_t r, std::size_t c, bool value) { data_[r].set(c, value); }
  const BitVector& row(std::size_t r) const { return data_[r]; }

  /// The `count` rows starting at `start`, wrapping cyclically.
  BitMatrix cyclic_window(std::size_t start, std::size_t count) const {
    std::vector<BitVector> rows;
    rows.reserve(count);
    for (std::size_t t = 0; t < count; ++t) rows.push_back(data_[(start + t) % data_.size()]);
    return from_rows(std::move(rows), cols_);
  }

  BitMatrix transpose() const {
    BitMatrix t(cols_, rows());
    for (std::size_t r = 0; r < rows(); ++r)
      for (std::size_t c = 0; c < cols_; ++c)
        if (get(r, c)) t.set(c, r, true);
    return t;
  }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<BitVector> data_;
};

}  // namespace secmacc
