#pragma once

// Cache placement for the four corner points: data subfiles (plain or
// AIR-coded) and key shares (full keys, AIR-coded sub-keys, or the shifted
// sub-key vector of the grouped case), plus the user-side recovery of what
// a user can reconstruct from its L caches.

#include "secmacc/bits.hpp"
#include "secmacc/error.hpp"
#include "secmacc/gf2.hpp"
#include "secmacc/random.hpp"
#include "secmacc/system_model.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace secmacc {

struct Key {
  std::uint32_t id = 0;   ///< 1-based, unique within a KeySet
  std::size_t group = 1;  ///< user group the key serves (Grouped); 1 otherwise
  std::size_t batch = 0;  ///< transmission slot within the group
  BitVector bits;
};

class KeySet {
 public:
  KeySet() = default;
  KeySet(std::vector<Key> keys, std::optional<std::uint64_t> seed) : keys_(std::move(keys)), seed_(seed) {}

  const std::vector<Key>& keys() const noexcept { return keys_; }
  std::size_t size() const noexcept { return keys_.size(); }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }

  const Key* find(std::uint32_t id) const {
    if (id >= 1 && id <= keys_.size() && keys_[id - 1].id == id) return &keys_[id - 1];
    for (const auto& k : keys_)
      if (k.id == id) return &k;
    return nullptr;
  }

  std::size_t total_bits() const {
    std::size_t n = 0;
    for (const auto& k : keys_) n += k.bits.size();
    return n;
  }

 private:
  std::vector<Key> keys_;
  std::optional<std::uint64_t> seed_;
};

/// Key id of the key serving `group` in transmission slot `batch` (both 1-based).
inline std::uint32_t key_id_for(const SystemParams& p, std::size_t group, std::size_t batch) {
  if (p.scheme() == SchemeCase::Grouped) return static_cast<std::uint32_t>((batch - 1) * p.g() + group);
  return static_cast<std::uint32_t>(batch);
}

namespace detail {

inline std::vector<Key> key_skeleton(const SystemParams& p) {
  std::vector<Key> keys(p.key_count());
  for (std::size_t n = 0; n < keys.size(); ++n) {
    auto& k = keys[n];
    k.id = static_cast<std::uint32_t>(n + 1);
    if (p.scheme() == SchemeCase::Grouped) {
      k.group = n % p.g() + 1;
      k.batch = n / p.g() + 1;
    } else {
      k.batch = n + 1;
    }
  }
  return keys;
}

}  // namespace detail

/// Fresh uniform keys for the case, key id `a` drawn from stream (seed, Key, a).
inline KeySet generate_keys(const SystemParams& p, std::uint64_t seed) {
  auto keys = detail::key_skeleton(p);
  for (auto& k : keys) {
    CounterRng rng(seed, StreamTag::Key, k.id);
    k.bits = BitVector::random(p.key_bits(), rng);
  }
  return KeySet(std::move(keys), seed);
}

/// Keys cut in id order from one packed bit string (used to enumerate
/// every key realisation).
inline KeySet keys_from_bits(const SystemParams& p, const BitVector& packed) {
  auto keys = detail::key_skeleton(p);
  if (packed.size() != keys.size() * p.key_bits())
    throw Error(Errc::LengthMismatch, "packed key material has wrong length");
  for (std::size_t n = 0; n < keys.size(); ++n) keys[n].bits = packed.slice(n * p.key_bits(), p.key_bits());
  return KeySet(std::move(keys), std::nullopt);
}

enum class ItemKind { Subfile, CodedSubfile, FullKey, SubKey, CodedSubKey };

constexpr std::string_view to_string(ItemKind k) {
  switch (k) {
    case ItemKind::Subfile: return "subfile";
    case ItemKind::CodedSubfile: return "coded_subfile";
    case ItemKind::FullKey: return "key";
    case ItemKind::SubKey: return "sub_key";
    case ItemKind::CodedSubKey: return "coded_sub_key";
  }
  return "?";
}

/// One labelled item stored in a cache.
///  Subfile       W<file>.<index>     index = subfile number
///  CodedSubfile  C<file>.<index>     index = coded share number (= cache)
///  FullKey       K<key_id>
///  SubKey        K<key_id>^<index>   index = sub-key number t
///  CodedSubKey   KC<key_id>.<index>  index = coded share number (= cache)
struct CacheItem {
  ItemKind kind = ItemKind::Subfile;
  std::size_t file = 0;
  std::size_t index = 0;
  std::uint32_t key_id = 0;
  BitVector bits;

  bool is_key() const noexcept { return kind == ItemKind::FullKey || kind == ItemKind::SubKey || kind == ItemKind::CodedSubKey; }

  std::string label() const {
    switch (kind) {
      case ItemKind::Subfile: return "W" + std::to_string(file) + "." + std::to_string(index);
      case ItemKind::CodedSubfile: return "C" + std::to_string(file) + "." + std::to_string(index);
      case ItemKind::FullKey: return "K" + std::to_string(key_id);
      case ItemKind::SubKey: return "K" + std::to_string(key_id) + "^" + std::to_string(index);
      case ItemKind::CodedSubKey: return "KC" + std::to_string(key_id) + "." + std::to_string(index);
    }
    return "?";
  }
};

struct Cache {
  std::vector<CacheItem> items;

  std::size_t bit_count() const {
    std::size_t n = 0;
    for (const auto& it : items) n += it.bits.size();
    return n;
  }
  std::size_t data_bits() const {
    std::size_t n = 0;
    for (const auto& it : items)
      if (!it.is_key()) n += it.bits.size();
    return n;
  }
  std::size_t key_bits() const { return bit_count() - data_bits(); }
};

struct Placement {
  SystemParams params;
  KeySet keys;
  std::vector<Cache> caches;  ///< cache k at index k-1
};

namespace detail {
inline void require_case(const SystemParams& p, std::initializer_list<SchemeCase> allowed, const char* op) {
  for (auto c : allowed)
    if (p.scheme() == c) return;
  throw Error(Errc::CaseMismatch, std::string(op) + " does not apply to the " + std::string(to_string(p.scheme())) +
                                      " case");
}
inline void require_keys(const SystemParams& p, const KeySet& keys) {
  if (keys.size() != p.key_count())
    throw Error(Errc::KeyExhausted, "key set holds " + std::to_string(keys.size()) + " keys, case needs " +
                                        std::to_string(p.key_count()));
  for (const auto& k : keys.keys())
    if (k.bits.size() != p.key_bits()) throw Error(Errc::LengthMismatch, "key length differs from the case's key size");
}
inline void merge_into(std::vector<Cache>& dst, std::vector<Cache> src) {
  for (std::size_t k = 0; k < dst.size(); ++k)
    for (auto& it : src[k].items) dst[k].items.push_back(std::move(it));
}
}  // namespace detail

/// M = 1: cache k stores the whole key with id k.
inline std::vector<Cache> place_full_keys(const SystemParams& p, const KeySet& keys) {
  detail::require_case(p, {SchemeCase::FullKey}, "place_full_keys");
  detail::require_keys(p, keys);
  std::vector<Cache> caches(p.K());
  for (std::size_t k = 1; k <= p.K(); ++k) {
    const Key* key = keys.find(static_cast<std::uint32_t>(k));
    caches[k - 1].items.push_back({ItemKind::FullKey, 0, 0, key->id, key->bits});
  }
  return caches;
}

inline std::pair<std::vector<Cache>, KeySet> place_full_keys(const SystemParams& p, std::uint64_t seed) {
  detail::require_case(p, {SchemeCase::FullKey}, "place_full_keys");
  auto keys = generate_keys(p, seed);
  auto caches = place_full_keys(p, keys);
  return {std::move(caches), std::move(keys)};
}

/// Subfile indices cache k stores: <(k-1)i+1> .. <ki> modulo K (or K~, i~).
inline std::vector<std::size_t> cached_subfile_indices(const SystemParams& p, std::size_t k) {
  detail::require_case(p, {SchemeCase::Coprime, SchemeCase::Grouped}, "cached_subfile_indices");
  const auto modulus = static_cast<std::int64_t>(p.group_size());
  const auto step = static_cast<std::int64_t>(p.group_step());
  std::vector<std::size_t> out;
  for (std::int64_t t = 1; t <= step; ++t)
    out.push_back(cyclic_index((static_cast<std::int64_t>(k) - 1) * step + t, modulus));
  return out;
}

inline std::vector<Cache> place_data_uncoded(const SystemParams& p, const FileLibrary& lib) {
  detail::require_case(p, {SchemeCase::Coprime, SchemeCase::Grouped}, "place_data_uncoded");
  std::vector<Cache> caches(p.K());
  for (std::size_t k = 1; k <= p.K(); ++k) {
    for (std::size_t s : cached_subfile_indices(p, k))
      for (std::size_t n = 1; n <= p.N(); ++n)
        caches[k - 1].items.push_back({ItemKind::Subfile, n, s, 0, lib.subfile(n, s, p.subfile_count())});
  }
  return caches;
}

/// Coprime case: every key is cut into L sub-keys and AIR(K, L) encoded;
/// cache k keeps coded share k of every key.
inline std::vector<Cache> place_keys_coprime(const SystemParams& p, const KeySet& keys) {
  detail::require_case(p, {SchemeCase::Coprime}, "place_keys_coprime");
  detail::require_keys(p, keys);
  const auto air = build_air(p.K(), p.L());
  std::vector<Cache> caches(p.K());
  for (const auto& key : keys.keys()) {
    const auto sub = split_even(key.bits, p.L());
    const auto shares = multiply_blocks(sub, air.matrix().transpose(), p.subkey_bits());
    for (std::size_t k = 1; k <= p.K(); ++k)
      caches[k - 1].items.push_back({ItemKind::CodedSubKey, 0, k, key.id, shares[k - 1]});
  }
  return caches;
}

inline std::pair<std::vector<Cache>, KeySet> place_keys_coprime(const SystemParams& p, std::uint64_t seed) {
  detail::require_case(p, {SchemeCase::Coprime}, "place_keys_coprime");
  auto keys = generate_keys(p, seed);
  auto caches = place_keys_coprime(p, keys);
  return {std::move(caches), std::move(keys)};
}

/// Grouped case, slot `batch`: the length-2K vector of (key id, sub-key t)
/// after L-1 right cyclic shifts. Entries 2(k-1) and 2(k-1)+1 go to cache k.
inline std::vector<std::pair<std::uint32_t, std::size_t>> grouped_key_layout(const SystemParams& p,
                                                                              std::size_t batch) {
  detail::require_case(p, {SchemeCase::Grouped}, "grouped_key_layout");
  const std::size_t len = 2 * p.K();
  std::vector<std::pair<std::uint32_t, std::size_t>> flat;
  flat.reserve(len);
  for (std::size_t j = 1; j <= p.g(); ++j)
    for (std::size_t t = 1; t <= 2 * p.Ktilde(); ++t)
      flat.emplace_back(key_id_for(p, j, batch),
                        cyclic_index(static_cast<std::int64_t>(t), static_cast<std::int64_t>(p.L() + 1)));
  std::vector<std::pair<std::uint32_t, std::size_t>> shifted(len);
  const std::size_t shift = p.L() - 1;
  for (std::size_t pos = 0; pos < len; ++pos) shifted[(pos + shift) % len] = flat[pos];
  return shifted;
}

inline std::vector<Cache> place_keys_grouped(const SystemParams& p, const KeySet& keys) {
  detail::require_case(p, {SchemeCase::Grouped}, "place_keys_grouped");
  detail::require_keys(p, keys);
  std::vector<Cache> caches(p.K());
  const std::size_t batches = p.table_rows() * p.table_rows();
  for (std::size_t b = 1; b <= batches; ++b) {
    const auto layout = grouped_key_layout(p, b);
    for (std::size_t pos = 0; pos < layout.size(); ++pos) {
      const auto [id, t] = layout[pos];
      const auto sub = split_even(keys.find(id)->bits, p.subkeys_per_key());
      caches[pos / 2].items.push_back({ItemKind::SubKey, 0, t, id, sub[t - 1]});
    }
  }
  return caches;
}

inline std::pair<std::vector<Cache>, KeySet> place_keys_grouped(const SystemParams& p, std::uint64_t seed) {
  detail::require_case(p, {SchemeCase::Grouped}, "place_keys_grouped");
  auto keys = generate_keys(p, seed);
  auto caches = place_keys_grouped(p, keys);
  return {std::move(caches), std::move(keys)};
}

/// M = N/L: every file is cut into L subfiles and AIR(K, L) encoded; cache k
/// keeps coded subfile k of every file.
inline std::vector<Cache> place_data_coded(const SystemParams& p, const FileLibrary& lib) {
  detail::require_case(p, {SchemeCase::CodedPlacement}, "place_data_coded");
  const auto air = build_air(p.K(), p.L());
  const auto mixer = air.matrix().transpose();
  std::vector<Cache> caches(p.K());
  for (std::size_t n = 1; n <= p.N(); ++n) {
    const auto parts = split_even(lib.file(n), p.L());
    const auto coded = multiply_blocks(parts, mixer, p.subfile_bits());
    for (std::size_t k = 1; k <= p.K(); ++k)
      caches[k - 1].items.push_back({ItemKind::CodedSubfile, n, k, 0, coded[k - 1]});
  }
  return caches;
}

/// Full placement (data and keys) for an explicit key set.
inline Placement place(const SystemParams& p, const FileLibrary& lib, KeySet keys) {
  if (lib.size() != p.N()) throw Error(Errc::BadParams, "library size differs from N");
  for (const auto& f : lib.files())
    if (f.size() != p.F()) throw Error(Errc::LengthMismatch, "library file length differs from F");
  std::vector<Cache> caches(p.K());
  switch (p.scheme()) {
    case SchemeCase::FullKey: detail::merge_into(caches, place_full_keys(p, keys)); break;
    case SchemeCase::Coprime:
      detail::merge_into(caches, place_data_uncoded(p, lib));
      detail::merge_into(caches, place_keys_coprime(p, keys));
      break;
    case SchemeCase::Grouped:
      detail::merge_into(caches, place_data_uncoded(p, lib));
      detail::merge_into(caches, place_keys_grouped(p, keys));
      break;
    case SchemeCase::CodedPlacement:
      detail::require_keys(p, keys);
      detail::merge_into(caches, place_data_coded(p, lib));
      break;
  }
  return Placement{p, std::move(keys), std::move(caches)};
}

inline Placement place(const SystemParams& p, const FileLibrary& lib, std::uint64_t seed) {
  return place(p, lib, generate_keys(p, seed));
}

// ---------------------------------------------------------------------------
// User side: what user k reconstructs from caches k, ..., <k+L-1>_K.

/// Every key user k can rebuild completely from its accessible caches.
inline std::map<std::uint32_t, BitVector> recover_keys(const Placement& pl, std::size_t k) {
  const auto& p = pl.params;
  const auto caches = accessible_caches(p, k);
  std::map<std::uint32_t, BitVector> out;
  switch (p.scheme()) {
    case SchemeCase::CodedPlacement: break;
    case SchemeCase::FullKey:
      for (auto c : caches)
        for (const auto& it : pl.caches[c - 1].items)
          if (it.kind == ItemKind::FullKey) out.emplace(it.key_id, it.bits);
      break;
    case SchemeCase::Coprime: {
      // shares[id][c] = row c of AIR(K, L) applied to the sub-keys.
      std::map<std::uint32_t, std::map<std::size_t, BitVector>> shares;
      for (auto c : caches)
        for (const auto& it : pl.caches[c - 1].items)
          if (it.kind == ItemKind::CodedSubKey) shares[it.key_id].emplace(it.index, it.bits);
      const auto air = build_air(p.K(), p.L());
      const auto system = air.window(k - 1);
      for (const auto& [id, by_cache] : shares) {
        std::vector<BitVector> rhs;
        for (auto c : caches) {
          auto it = by_cache.find(c);
          if (it == by_cache.end()) break;
          rhs.push_back(it->second);
        }
        if (rhs.size() != caches.size()) continue;
        out.emplace(id, concat(solve_blocks(system, rhs)));
      }
      break;
    }
    case SchemeCase::Grouped: {
      std::map<std::uint32_t, std::map<std::size_t, BitVector>> parts;
      for (auto c : caches)
        for (const auto& it : pl.caches[c - 1].items)
          if (it.kind == ItemKind::SubKey) parts[it.key_id].emplace(it.index, it.bits);
      for (auto& [id, by_t] : parts) {
        if (by_t.size() != p.subkeys_per_key()) continue;
        std::vector<BitVector> ordered;
        for (auto& [t, bits] : by_t) ordered.push_back(bits);
        out.emplace(id, concat(ordered));
      }
      break;
    }
  }
  return out;
}

/// Plain subfiles user k holds, keyed by (file, subfile index).
inline std::map<std::pair<std::size_t, std::size_t>, BitVector> recover_subfiles(const Placement& pl, std::size_t k) {
  std::map<std::pair<std::size_t, std::size_t>, BitVector> out;
  for (auto c : accessible_caches(pl.params, k))
    for (const auto& it : pl.caches[c - 1].items)
      if (it.kind == ItemKind::Subfile) out.emplace(std::pair{it.file, it.index}, it.bits);
  return out;
}

/// Coded placement: user k rebuilds every file from its L adjacent coded shares.
inline std::vector<BitVector> recover_all_files_coded(const Placement& pl, std::size_t k) {
  const auto& p = pl.params;
  detail::require_case(p, {SchemeCase::CodedPlacement}, "recover_all_files_coded");
  const auto caches = accessible_caches(p, k);
  const auto system = build_air(p.K(), p.L()).window(k - 1);
  std::vector<BitVector> files;
  for (std::size_t n = 1; n <= p.N(); ++n) {
    std::vector<BitVector> rhs;
    for (auto c : caches)
      for (const auto& it : pl.caches[c - 1].items)
        if (it.kind == ItemKind::CodedSubfile && it.file == n) rhs.push_back(it.bits);
    if (rhs.size() != caches.size())
      throw Error(Errc::DecodeFailure, "user " + std::to_string(k) + " lacks coded shares of file " + std::to_string(n));
    files.push_back(concat(solve_blocks(system, rhs)));
  }
  return files;
}

/// Manifest CSV: cache_id,item_kind,item_id,bit_length,offset
inline void write_manifest(std::ostream& os, const Placement& pl) {
  os << "cache_id,item_kind,item_id,bit_length,offset\n";
  for (std::size_t k = 0; k < pl.caches.size(); ++k) {
    std::size_t offset = 0;
    for (const auto& it : pl.caches[k].items) {
      os << k + 1 << ',' << to_string(it.kind) << ',' << it.label() << ',' << it.bits.size() << ',' << offset << '\n';
      offset += it.bits.size();
    }
  }
}

}  // namespace secmacc
