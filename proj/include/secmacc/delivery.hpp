#pragma once

// Encrypted delivery. For the uncoded cases each row j of the per-group
// demand table is reordered so position p carries a subfile with index p;
// row j is then an index coding instance with U = j-1, D = rows-j, encoded
// with AIR(K_eff, rows), and every coded symbol is XORed with its own key.

#include "secmacc/bits.hpp"
#include "secmacc/cyclic.hpp"
#include "secmacc/error.hpp"
#include "secmacc/index_coding.hpp"
#include "secmacc/placement.hpp"
#include "secmacc/rational.hpp"
#include "secmacc/system_model.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace secmacc {

struct DemandEntry {
  std::size_t user = 0;     ///< global user index
  std::size_t file = 0;     ///< d_user
  std::size_t subfile = 0;  ///< subfile index (1..K_eff)
  friend bool operator==(const DemandEntry&, const DemandEntry&) = default;
};

/// entries[j-1][k-1]: what local user k of `group` still needs in row j.
struct DemandTable {
  std::size_t group = 1;
  std::vector<std::vector<DemandEntry>> entries;

  std::size_t rows() const noexcept { return entries.size(); }
};

inline std::size_t global_user(const SystemParams& p, std::size_t group, std::size_t local) {
  return (group - 1) * p.group_size() + local;
}

inline DemandTable build_demand_table(const SystemParams& p, const DemandVector& d, std::size_t group = 1) {
  detail::require_case(p, {SchemeCase::Coprime, SchemeCase::Grouped}, "build_demand_table");
  if (group < 1 || group > p.groups()) throw Error(Errc::IndexError, "group out of range");
  const auto Ke = static_cast<std::int64_t>(p.group_size());
  const auto ie = static_cast<std::int64_t>(p.group_step());
  const auto L = static_cast<std::int64_t>(p.L());
  DemandTable table;
  table.group = group;
  for (std::int64_t j = 1; j <= static_cast<std::int64_t>(p.table_rows()); ++j) {
    std::vector<DemandEntry> row;
    for (std::int64_t k = 1; k <= Ke; ++k) {
      const auto u = global_user(p, group, static_cast<std::size_t>(k));
      row.push_back({u, d[u], cyclic_index(ie * (L + k - 1) + j, Ke)});
    }
    table.entries.push_back(std::move(row));
  }
  return table;
}

/// users[p-1] is the local user whose row-j subfile has index p, i.e. the
/// unique u with <i(u+L-1)+j>_K = p.
inline std::vector<std::size_t> row_permutation(std::size_t K, std::size_t i, std::size_t L, std::size_t j) {
  if (std::gcd(K, i) != 1)
    throw Error(Errc::NotCoprime, "row permutation needs gcd(K, i) = 1, got K=" + std::to_string(K) +
                                      " i=" + std::to_string(i));
  std::vector<std::size_t> users(K, 0);
  for (std::size_t u = 1; u <= K; ++u) {
    const auto pos = cyclic_index(static_cast<std::int64_t>(i * (u + L - 1) + j), static_cast<std::int64_t>(K));
    users[pos - 1] = u;
  }
  return users;
}

inline std::vector<std::size_t> row_permutation(const SystemParams& p, std::size_t j) {
  detail::require_case(p, {SchemeCase::Coprime, SchemeCase::Grouped}, "row_permutation");
  return row_permutation(p.group_size(), p.group_step(), p.L(), j);
}

/// Row j reordered so that position p holds the entry whose subfile index is p.
inline std::vector<DemandEntry> permute_row(const SystemParams& p, std::size_t j, const std::vector<DemandEntry>& row) {
  const auto users = row_permutation(p, j);
  std::vector<DemandEntry> out;
  out.reserve(users.size());
  for (auto u : users) out.push_back(row[u - 1]);
  return out;
}

/// One broadcast symbol. Everything except the key material behind key_id
/// is public.
struct Transmission {
  BitVector payload;
  std::optional<std::uint32_t> key_id;
  std::size_t group = 1;
  std::size_t row = 0;
  std::size_t column = 0;
};

struct DeliveryOptions {
  bool encrypt = true;  ///< false gives the unkeyed baseline
};

/// Server side: builds X^d from the library and the key set.
inline std::vector<Transmission> encode_deliver(const SystemParams& p, const FileLibrary& lib, const KeySet& keys,
                                                const DemandVector& d, DeliveryOptions opts = {}) {
  if (d.size() != p.K()) throw Error(Errc::BadParams, "demand size differs from K");
  std::vector<Transmission> out;
  auto key_bits = [&](std::uint32_t id) -> const BitVector& {
    const Key* k = keys.find(id);
    if (!k) throw Error(Errc::KeyExhausted, "no key with id " + std::to_string(id));
    return k->bits;
  };

  switch (p.scheme()) {
    case SchemeCase::CodedPlacement: return out;
    case SchemeCase::FullKey:
      for (std::size_t k = 1; k <= p.K(); ++k) {
        Transmission t;
        t.payload = lib.file(d[k]);
        t.row = k;
        t.column = 1;
        if (opts.encrypt) {
          t.key_id = static_cast<std::uint32_t>(k);
          t.payload ^= key_bits(*t.key_id);
        }
        out.push_back(std::move(t));
      }
      return out;
    case SchemeCase::Coprime:
    case SchemeCase::Grouped: break;
  }

  const std::size_t rows = p.table_rows();
  const std::size_t parts = p.subfile_count();
  for (std::size_t group = 1; group <= p.groups(); ++group) {
    const auto table = build_demand_table(p, d, group);
    for (std::size_t j = 1; j <= rows; ++j) {
      const auto ordered = permute_row(p, j, table.entries[j - 1]);
      std::vector<BitVector> messages;
      messages.reserve(ordered.size());
      for (const auto& e : ordered) messages.push_back(lib.subfile(e.file, e.subfile, parts));
      auto symbols = encode(p.group_size(), j - 1, rows - j, messages);
      for (std::size_t c = 1; c <= rows; ++c) {
        Transmission t;
        t.payload = std::move(symbols[c - 1]);
        t.group = group;
        t.row = j;
        t.column = c;
        if (opts.encrypt) {
          t.key_id = key_id_for(p, group, (j - 1) * rows + c);
          t.payload ^= key_bits(*t.key_id);
        }
        out.push_back(std::move(t));
      }
    }
  }
  return out;
}

inline std::vector<Transmission> encode_deliver(const Placement& pl, const FileLibrary& lib, const DemandVector& d,
                                                DeliveryOptions opts = {}) {
  return encode_deliver(pl.params, lib, pl.keys, d, opts);
}

/// User side: rebuilds W_{d_k} from its L caches and the broadcast.
inline BitVector decode_user(const Placement& pl, const std::vector<Transmission>& tx, const DemandVector& d,
                             std::size_t k) {
  const auto& p = pl.params;
  if (k < 1 || k > p.K()) throw Error(Errc::IndexError, "user index out of range");
  auto fail = [&](const std::string& why) {
    return Error(Errc::DecodeFailure, "user " + std::to_string(k) + ": " + why);
  };

  if (p.scheme() == SchemeCase::CodedPlacement) return recover_all_files_coded(pl, k).at(d[k] - 1);

  const auto keys = recover_keys(pl, k);
  auto key_for = [&](const Transmission& t) -> const BitVector& {
    if (!t.key_id) throw fail("transmission without a key id");
    auto it = keys.find(*t.key_id);
    if (it == keys.end()) throw fail("cannot rebuild key " + std::to_string(*t.key_id) + " from its caches");
    return it->second;
  };

  if (p.scheme() == SchemeCase::FullKey) {
    for (const auto& t : tx)
      if (t.row == k) return t.payload ^ key_for(t);
    throw fail("no transmission addressed to this user");
  }

  const auto known = recover_subfiles(pl, k);
  const std::size_t rows = p.table_rows();
  const std::size_t Ke = p.group_size();
  const std::size_t group = (k - 1) / Ke + 1;
  const std::size_t local = k - (group - 1) * Ke;
  std::map<std::size_t, BitVector> pieces;
  for (const auto& [fs, bits] : known)
    if (fs.first == d[k]) pieces.emplace(fs.second, bits);

  for (std::size_t j = 1; j <= rows; ++j) {
    std::vector<BitVector> codeword(rows);
    std::size_t found = 0;
    for (const auto& t : tx) {
      if (t.group != group || t.row != j) continue;
      if (t.column < 1 || t.column > rows) throw fail("transmission column out of range in row " + std::to_string(j));
      codeword[t.column - 1] = t.payload ^ key_for(t);
      ++found;
    }
    if (found != rows) throw fail("row " + std::to_string(j) + " has " + std::to_string(found) + " of " +
                                  std::to_string(rows) + " symbols");

    const auto users = row_permutation(p, j);
    const auto wanted = cyclic_index(static_cast<std::int64_t>(p.group_step() * (local + p.L() - 1) + j),
                                     static_cast<std::int64_t>(Ke));
    std::map<std::size_t, BitVector> side;
    for (auto pos : side_info_positions(Ke, j - 1, rows - j, wanted)) {
      const auto other = global_user(p, group, users[pos - 1]);
      auto it = known.find({d[other], pos});
      if (it == known.end())
        throw fail("row " + std::to_string(j) + " side information W" + std::to_string(d[other]) + "." +
                   std::to_string(pos) + " is not in its caches");
      side.emplace(pos, it->second);
    }
    pieces[wanted] = decode_receiver(codeword, side, wanted, Ke, j - 1, rows - j);
  }

  std::vector<BitVector> ordered;
  for (std::size_t s = 1; s <= p.subfile_count(); ++s) {
    auto it = pieces.find(s);
    if (it == pieces.end()) throw fail("subfile " + std::to_string(s) + " still missing after delivery");
    ordered.push_back(it->second);
  }
  return concat(ordered);
}

/// Total broadcast bits divided by F.
inline Rational measured_rate(const std::vector<Transmission>& tx, std::size_t F) {
  std::int64_t bits = 0;
  for (const auto& t : tx) bits += static_cast<std::int64_t>(t.payload.size());
  return make_rational(bits, static_cast<std::int64_t>(F));
}

/// Rate the corner-point formula predicts: K, K(1 - iL/K)^2, or 0.
inline Rational formula_rate(const SystemParams& p) {
  const auto K = static_cast<std::int64_t>(p.K());
  switch (p.scheme()) {
    case SchemeCase::FullKey: return make_rational(K);
    case SchemeCase::CodedPlacement: return make_rational(0);
    case SchemeCase::Coprime:
    case SchemeCase::Grouped: {
      const auto i = static_cast<std::int64_t>(*p.i());
      const Rational gap = make_rational(K - i * static_cast<std::int64_t>(p.L()), K);
      return make_rational(K) * gap * gap;
    }
  }
  return make_rational(0);
}

/// Trace CSV: tx_index,group,row_j,air_column,key_id,bit_length,payload_hex
inline void write_trace(std::ostream& os, const std::vector<Transmission>& tx) {
  os << "tx_index,group,row_j,air_column,key_id,bit_length,payload_hex\n";
  for (std::size_t n = 0; n < tx.size(); ++n) {
    const auto& t = tx[n];
    os << n + 1 << ',' << t.group << ',' << t.row << ',' << t.column << ',';
    if (t.key_id) os << *t.key_id;
    os << ',' << t.payload.size() << ',' << t.payload.to_hex() << '\n';
  }
}

}  // namespace secmacc
