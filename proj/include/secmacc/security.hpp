#pragma once

// Wiretap security checks. The wiretapper sees the broadcast only (payloads
// plus public provenance), never cache contents.

#include "secmacc/bits.hpp"
#include "secmacc/delivery.hpp"
#include "secmacc/error.hpp"
#include "secmacc/placement.hpp"
#include "secmacc/random.hpp"
#include "secmacc/rational.hpp"
#include "secmacc/system_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

namespace secmacc {

// ---------------------------------------------------------------------------
// Structural one-time-pad audit

enum class Violation { MissingKey, UnknownKey, LengthMismatch, KeyReuse, KeyUnused, DuplicateKeyId };

constexpr std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::MissingKey: return "MissingKey";
    case Violation::UnknownKey: return "UnknownKey";
    case Violation::LengthMismatch: return "LengthMismatch";
    case Violation::KeyReuse: return "KeyReuse";
    case Violation::KeyUnused: return "KeyUnused";
    case Violation::DuplicateKeyId: return "DuplicateKeyId";
  }
  return "?";
}

struct AuditFinding {
  Violation kind;
  std::optional<std::size_t> tx_index;  ///< 1-based
  std::optional<std::uint32_t> key_id;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditFinding> findings;
  std::size_t transmissions = 0;
  std::size_t keys_used = 0;

  bool pass() const noexcept { return findings.empty(); }
  bool has(Violation v) const {
    return std::any_of(findings.begin(), findings.end(), [v](const auto& f) { return f.kind == v; });
  }
};

/// Checks that every transmission is padded by exactly one key of its own
/// length, and that every key of the set pads exactly one transmission.
inline AuditReport structural_audit(const std::vector<Transmission>& tx, const KeySet& keys) {
  AuditReport report;
  report.transmissions = tx.size();

  std::map<std::uint32_t, std::size_t> seen_ids;
  for (const auto& k : keys.keys())
    if (++seen_ids[k.id] == 2)
      report.findings.push_back({Violation::DuplicateKeyId, std::nullopt, k.id, "key id appears twice in the key set"});

  std::map<std::uint32_t, std::size_t> uses;
  for (std::size_t n = 0; n < tx.size(); ++n) {
    const auto& t = tx[n];
    if (!t.key_id) {
      report.findings.push_back({Violation::MissingKey, n + 1, std::nullopt, "transmission is sent in the clear"});
      continue;
    }
    const Key* key = keys.find(*t.key_id);
    if (!key) {
      report.findings.push_back({Violation::UnknownKey, n + 1, t.key_id, "key id not in the key set"});
      continue;
    }
    if (key->bits.size() != t.payload.size())
      report.findings.push_back({Violation::LengthMismatch, n + 1, t.key_id,
                                 "payload " + std::to_string(t.payload.size()) + " bits, key " +
                                     std::to_string(key->bits.size()) + " bits"});
    if (++uses[*t.key_id] == 2)
      report.findings.push_back({Violation::KeyReuse, n + 1, t.key_id, "key pads more than one transmission"});
  }
  for (const auto& k : keys.keys())
    if (!uses.contains(k.id))
      report.findings.push_back({Violation::KeyUnused, std::nullopt, k.id, "key never used"});
  report.keys_used = uses.size();
  return report;
}

/// Fault injection: re-pads transmission `victim` (0-based) with the key of
/// transmission `donor`, so one key covers two symbols.
inline std::vector<Transmission> inject_key_reuse(std::vector<Transmission> tx, const KeySet& keys, std::size_t donor,
                                                  std::size_t victim) {
  auto& v = tx.at(victim);
  const auto& d = tx.at(donor);
  if (!v.key_id || !d.key_id) throw Error(Errc::KeyExhausted, "fault injection needs two encrypted transmissions");
  v.payload ^= keys.find(*v.key_id)->bits;
  v.payload ^= keys.find(*d.key_id)->bits;
  v.key_id = d.key_id;
  return tx;
}

// ---------------------------------------------------------------------------
// Entropy accounting

struct EntropyAccounting {
  Rational h_x_upper;     ///< bits; upper bound on H(X^d)
  Rational h_x_given_w;   ///< bits; H(X^d | W) = entropy of the keys used
};

inline EntropyAccounting entropy_accounting(const SystemParams& p) {
  detail::require_case(p, {SchemeCase::FullKey, SchemeCase::Coprime, SchemeCase::Grouped}, "entropy_accounting");
  const auto F = static_cast<std::int64_t>(p.F());
  EntropyAccounting e;
  e.h_x_upper = formula_rate(p) * make_rational(F);
  e.h_x_given_w = make_rational(static_cast<std::int64_t>(p.key_count() * p.key_bits()));
  if (e.h_x_upper > e.h_x_given_w)
    throw Error(Errc::BoundViolated, "broadcast entropy bound exceeds key entropy for " + p.describe());
  return e;
}

// ---------------------------------------------------------------------------
// Exhaustive mutual-information oracle

enum class EnumerationMode {
  ExhaustiveFiles,  ///< every library realisation x every key realisation
  SampledFiles,     ///< a seeded sample of libraries x every key realisation
};

struct WiretapInstance {
  SystemParams params;
  DemandVector demand;
  EnumerationMode mode = EnumerationMode::ExhaustiveFiles;
  std::size_t file_samples = 256;  ///< SampledFiles only
  std::uint64_t seed = 1;          ///< SampledFiles only
  bool encrypt = true;             ///< false runs the unkeyed baseline
};

inline constexpr std::size_t kMaxFileBits = 20;
inline constexpr std::size_t kMaxKeyBits = 12;
inline constexpr std::uint64_t kMaxStates = std::uint64_t{1} << 32;

struct MutualInformation {
  /// Exact value in bits; meaningful when `exact` is set.
  Rational bits;
  /// Always available; equal to `bits` when exact.
  double approx = 0.0;
  /// True when every probability involved is dyadic, so I is rational.
  bool exact = true;
  /// X independent of W: every library yields the same distribution of X.
  /// Equivalent to I = 0 and decided by exact count comparison.
  bool independent = true;
  std::uint64_t file_realisations = 0;
  std::uint64_t key_realisations = 0;
};

namespace detail {

// Partial result over a slice of library realisations.
struct OracleAccumulator {
  std::unordered_map<std::uint64_t, std::uint64_t> marginal;  // c(x)
  std::int64_t joint_log_sum = 0;                             // sum c(x,w) log2 c(x,w), dyadic counts
  double joint_log_sum_f = 0.0;
  bool dyadic = true;
  bool have_reference = false;
  bool independent = true;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> reference;  // sorted c(.|w) of the first w
  std::uint64_t libraries = 0;
};

inline std::uint64_t pack_broadcast(const std::vector<Transmission>& tx) {
  std::uint64_t v = 0;
  std::size_t shift = 0;
  for (const auto& t : tx)
    for (std::size_t b = 0; b < t.payload.size(); ++b, ++shift)
      if (t.payload.get(b)) v |= std::uint64_t{1} << shift;
  return v;
}

inline bool is_pow2(std::uint64_t c) { return c != 0 && (c & (c - 1)) == 0; }

inline void accumulate_library(OracleAccumulator& acc, const WiretapInstance& inst, const FileLibrary& lib,
                               const std::vector<KeySet>& key_space) {
  std::vector<std::uint64_t> xs;
  xs.reserve(key_space.size());
  for (const auto& keys : key_space)
    xs.push_back(pack_broadcast(encode_deliver(inst.params, lib, keys, inst.demand, {inst.encrypt})));
  std::sort(xs.begin(), xs.end());

  std::vector<std::pair<std::uint64_t, std::uint64_t>> row;
  for (std::size_t a = 0; a < xs.size();) {
    std::size_t b = a;
    while (b < xs.size() && xs[b] == xs[a]) ++b;
    row.emplace_back(xs[a], b - a);
    a = b;
  }
  for (const auto& [x, c] : row) {
    acc.marginal[x] += c;
    if (is_pow2(c))
      acc.joint_log_sum += static_cast<std::int64_t>(c) * std::countr_zero(c);
    else
      acc.dyadic = false;
    acc.joint_log_sum_f += static_cast<double>(c) * std::log2(static_cast<double>(c));
  }
  if (!acc.have_reference) {
    acc.reference = std::move(row);
    acc.have_reference = true;
  } else if (row != acc.reference) {
    acc.independent = false;
  }
  ++acc.libraries;
}

inline FileLibrary library_from_index(const SystemParams& p, std::uint64_t w) {
  std::vector<BitVector> files;
  for (std::size_t n = 0; n < p.N(); ++n) files.push_back(BitVector::from_uint(w >> (n * p.F()), p.F()));
  return FileLibrary::from_files(std::move(files));
}

}  // namespace detail

/// Computes I(X^d; W) by enumerating every (library, keys) realisation.
///
/// Libraries are uniform over the enumerated set, keys uniform over all
/// key bit patterns. Enumeration can be split across `workers` threads by
/// library index; partial counts merge associatively, so the result does
/// not depend on the split.
inline MutualInformation mutual_information_oracle(const WiretapInstance& inst, unsigned workers = 1) {
  const auto& p = inst.params;
  const std::size_t file_bits = p.N() * p.F();
  const std::size_t key_bits = inst.encrypt ? p.key_count() * p.key_bits() : 0;
  if (key_bits > kMaxKeyBits)
    throw Error(Errc::TooLarge, std::to_string(key_bits) + " key bits exceed the enumeration limit of " +
                                    std::to_string(kMaxKeyBits));

  std::uint64_t libraries = 0;
  if (inst.mode == EnumerationMode::ExhaustiveFiles) {
    if (file_bits > kMaxFileBits)
      throw Error(Errc::TooLarge, std::to_string(file_bits) + " file bits exceed the enumeration limit of " +
                                      std::to_string(kMaxFileBits));
    libraries = std::uint64_t{1} << file_bits;
  } else {
    if (inst.file_samples == 0) throw Error(Errc::BadParams, "sampled mode needs at least one library");
    libraries = inst.file_samples;
  }
  const std::uint64_t key_space_size = std::uint64_t{1} << key_bits;
  if (libraries > kMaxStates / key_space_size) throw Error(Errc::TooLarge, "enumeration exceeds 2^32 states");
  if (formula_rate(p) * make_rational(static_cast<std::int64_t>(p.F())) > make_rational(64))
    throw Error(Errc::TooLarge, "broadcast longer than 64 bits");

  std::vector<KeySet> key_space;
  key_space.reserve(key_space_size);
  if (inst.encrypt) {
    for (std::uint64_t v = 0; v < key_space_size; ++v)
      key_space.push_back(keys_from_bits(p, BitVector::from_uint(v, key_bits)));
  } else {
    key_space.push_back(generate_keys(p, 0));
  }

  auto library_at = [&](std::uint64_t w) {
    if (inst.mode == EnumerationMode::ExhaustiveFiles) return detail::library_from_index(p, w);
    return FileLibrary::generate(p.N(), p.F(), CounterRng(inst.seed, StreamTag::Sample, w).next());
  };

  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(libraries, 64))));
  std::vector<detail::OracleAccumulator> parts(workers);
  auto run = [&](unsigned part) {
    const std::uint64_t lo = libraries * part / workers;
    const std::uint64_t hi = libraries * (part + 1) / workers;
    for (std::uint64_t w = lo; w < hi; ++w) detail::accumulate_library(parts[part], inst, library_at(w), key_space);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned part = 0; part < workers; ++part) pool.emplace_back(run, part);
    for (auto& t : pool) t.join();
  }

  // Merge in part order.
  detail::OracleAccumulator total = std::move(parts[0]);
  for (unsigned part = 1; part < workers; ++part) {
    auto& q = parts[part];
    for (const auto& [x, c] : q.marginal) total.marginal[x] += c;
    total.joint_log_sum += q.joint_log_sum;
    total.joint_log_sum_f += q.joint_log_sum_f;
    total.dyadic = total.dyadic && q.dyadic;
    total.independent = total.independent && q.independent && q.reference == total.reference;
    total.libraries += q.libraries;
  }

  // With c(w) = |keys| for every w and T = |W| |keys|:
  //   I = (sum c(x,w) log c(x,w) - sum c(x) log c(x)) / T + log |W|
  const std::uint64_t T = libraries * key_space_size;
  std::int64_t marg_log_sum = 0;
  double marg_log_sum_f = 0.0;
  bool dyadic = total.dyadic && detail::is_pow2(libraries);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> marg(total.marginal.begin(), total.marginal.end());
  std::sort(marg.begin(), marg.end());
  for (const auto& [x, c] : marg) {
    if (detail::is_pow2(c))
      marg_log_sum += static_cast<std::int64_t>(c) * std::countr_zero(c);
    else
      dyadic = false;
    marg_log_sum_f += static_cast<double>(c) * std::log2(static_cast<double>(c));
  }

  MutualInformation mi;
  mi.file_realisations = libraries;
  mi.key_realisations = key_space_size;
  mi.independent = total.independent;
  mi.exact = dyadic || total.independent;
  if (total.independent) {
    mi.bits = 0;
    mi.approx = 0.0;
  } else {
    mi.approx = (total.joint_log_sum_f - marg_log_sum_f) / static_cast<double>(T) +
                std::log2(static_cast<double>(libraries));
    if (dyadic)
      mi.bits = Rational(BigInt(total.joint_log_sum - marg_log_sum), BigInt(T)) +
                make_rational(std::countr_zero(libraries));
  }
  return mi;
}

/// Oracle report CSV header:
/// instance_id,file_bits,key_bits,mutual_information_num,mutual_information_den,verdict
inline void write_oracle_header(std::ostream& os) {
  os << "instance_id,file_bits,key_bits,mutual_information_num,mutual_information_den,verdict\n";
}

/// Inexact values are written on a 2^-32 grid.
inline void write_oracle_row(std::ostream& os, const std::string& id, const WiretapInstance& inst,
                             const MutualInformation& mi, bool pass) {
  const auto& p = inst.params;
  const std::size_t key_bits = inst.encrypt ? p.key_count() * p.key_bits() : 0;
  Rational value = mi.bits;
  if (!mi.exact)
    value = Rational(BigInt(static_cast<std::int64_t>(std::llround(mi.approx * 4294967296.0))), BigInt(4294967296LL));
  os << id << ',' << p.N() * p.F() << ',' << key_bits << ',' << num_str(value) << ',' << den_str(value) << ','
     << (pass ? "pass" : "fail") << '\n';
}

}  // namespace secmacc
