#pragma once

#include "secmacc/bits.hpp"
#include "secmacc/cyclic.hpp"
#include "secmacc/error.hpp"
#include "secmacc/random.hpp"
#include "secmacc/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace secmacc {

/// The four corner-point constructions.
enum class SchemeCase {
  FullKey,         ///< M = 1: one full-size key per cache, no data.
  Coprime,         ///< uncoded data with gcd(K, i) = 1, AIR-coded sub-keys.
  Grouped,         ///< uncoded data with gcd(K, i) = g > 1, shifted sub-key vector.
  CodedPlacement,  ///< M = N/L: AIR-coded data, no keys, no delivery.
};

/// Which memory point the caller asks for; Uncoded resolves to Coprime or
/// Grouped depending on gcd(K, i).
enum class MemoryPoint { FullKey, Uncoded, Coded };

constexpr std::string_view to_string(SchemeCase c) {
  switch (c) {
    case SchemeCase::FullKey: return "full-key";
    case SchemeCase::Coprime: return "coprime";
    case SchemeCase::Grouped: return "grouped";
    case SchemeCase::CodedPlacement: return "coded";
  }
  return "?";
}

struct RawParams {
  std::size_t K = 0;
  std::size_t L = 0;
  std::size_t N = 0;
  std::optional<std::size_t> i;
  std::optional<std::size_t> F;  ///< nullopt selects the smallest valid F >= 64
  MemoryPoint point = MemoryPoint::Uncoded;
};

/// Validated (K, L, N, i, F) with every derived quantity. Immutable; only
/// validate_params() creates one.
class SystemParams {
 public:
  std::size_t K() const noexcept { return K_; }
  std::size_t L() const noexcept { return L_; }
  std::size_t N() const noexcept { return N_; }
  std::optional<std::size_t> i() const noexcept { return i_; }
  std::size_t F() const noexcept { return F_; }
  SchemeCase scheme() const noexcept { return case_; }
  std::size_t g() const noexcept { return g_; }
  std::size_t Ktilde() const noexcept { return Ktilde_; }
  std::size_t itilde() const noexcept { return itilde_; }

  bool uncoded() const noexcept { return case_ == SchemeCase::Coprime || case_ == SchemeCase::Grouped; }

  /// Number of independent user groups in delivery (g for Grouped, else 1).
  std::size_t groups() const noexcept { return case_ == SchemeCase::Grouped ? g_ : 1; }
  /// Users per group: K, or K~ in the Grouped case.
  std::size_t group_size() const noexcept { return case_ == SchemeCase::Grouped ? Ktilde_ : K_; }
  /// Subfiles per cache within a group: i, or i~ in the Grouped case.
  std::size_t group_step() const noexcept { return case_ == SchemeCase::Grouped ? itilde_ : (i_ ? *i_ : 0); }
  /// Rows of the per-group demand table, K_eff - i_eff L.
  std::size_t table_rows() const noexcept { return uncoded() ? group_size() - group_step() * L_ : 0; }

  /// Subfiles per file: K (Coprime), K~ (Grouped), L (coded), 1 (FullKey).
  std::size_t subfile_count() const noexcept {
    switch (case_) {
      case SchemeCase::FullKey: return 1;
      case SchemeCase::Coprime: return K_;
      case SchemeCase::Grouped: return Ktilde_;
      case SchemeCase::CodedPlacement: return L_;
    }
    return 1;
  }
  std::size_t subfile_bits() const noexcept { return F_ / subfile_count(); }

  std::size_t key_count() const noexcept {
    switch (case_) {
      case SchemeCase::FullKey: return K_;
      case SchemeCase::Coprime:
      case SchemeCase::Grouped: return groups() * table_rows() * table_rows();
      case SchemeCase::CodedPlacement: return 0;
    }
    return 0;
  }
  std::size_t key_bits() const noexcept {
    switch (case_) {
      case SchemeCase::FullKey: return F_;
      case SchemeCase::Coprime:
      case SchemeCase::Grouped: return subfile_bits();
      case SchemeCase::CodedPlacement: return 0;
    }
    return 0;
  }
  /// Sub-keys each key is split into: L (Coprime), L+1 (Grouped), 1 otherwise.
  std::size_t subkeys_per_key() const noexcept {
    switch (case_) {
      case SchemeCase::Coprime: return L_;
      case SchemeCase::Grouped: return L_ + 1;
      default: return 1;
    }
  }
  std::size_t subkey_bits() const noexcept { return key_bits() / subkeys_per_key(); }

  /// F must be a multiple of this.
  std::size_t subpacketization() const noexcept { return required_subpacketization(case_, K_, L_, Ktilde_); }

  static std::size_t required_subpacketization(SchemeCase c, std::size_t K, std::size_t L, std::size_t Ktilde) {
    switch (c) {
      case SchemeCase::FullKey: return 1;
      case SchemeCase::Coprime: return K * L;
      case SchemeCase::Grouped: return Ktilde * (L + 1);
      case SchemeCase::CodedPlacement: return L;
    }
    return 1;
  }

  std::string describe() const {
    std::string s = "K=" + std::to_string(K_) + " L=" + std::to_string(L_) + " N=" + std::to_string(N_);
    if (i_) s += " i=" + std::to_string(*i_);
    s += " F=" + std::to_string(F_) + " case=" + std::string(to_string(case_));
    return s;
  }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;

 private:
  friend SystemParams validate_params(const RawParams& raw);
  SystemParams() = default;

  std::size_t K_ = 0, L_ = 0, N_ = 0;
  std::optional<std::size_t> i_;
  std::size_t F_ = 0;
  SchemeCase case_ = SchemeCase::FullKey;
  std::size_t g_ = 1, Ktilde_ = 0, itilde_ = 0;
};

inline SystemParams validate_params(const RawParams& raw) {
  auto bad = [](const std::string& why) { return Error(Errc::BadParams, why); };
  const auto K = raw.K, L = raw.L, N = raw.N;
  if (K < 1) throw bad("K must be at least 1");
  if (L < 1 || L >= K) throw bad("need 1 <= L < K, got L=" + std::to_string(L) + " K=" + std::to_string(K));
  if (N < K) throw bad("need N >= K, got N=" + std::to_string(N) + " K=" + std::to_string(K));

  SystemParams p;
  p.K_ = K;
  p.L_ = L;
  p.N_ = N;
  p.Ktilde_ = K;

  switch (raw.point) {
    case MemoryPoint::FullKey:
      if (raw.i) throw bad("i is not used at the M = 1 point");
      p.case_ = SchemeCase::FullKey;
      break;
    case MemoryPoint::Coded:
      if (raw.i) throw bad("i is not used at the M = N/L point");
      p.case_ = SchemeCase::CodedPlacement;
      break;
    case MemoryPoint::Uncoded: {
      if (!raw.i) throw bad("uncoded placement needs i");
      const std::size_t i = *raw.i;
      if (i < 1) throw bad("i must be at least 1");
      if (i * L > K)
        throw bad("iL > K (i=" + std::to_string(i) + ", L=" + std::to_string(L) + ", iL=" + std::to_string(i * L) +
                  " > K=" + std::to_string(K) + ")");
      p.i_ = i;
      p.g_ = std::gcd(K, i);
      p.Ktilde_ = K / p.g_;
      p.itilde_ = i / p.g_;
      p.case_ = p.g_ == 1 ? SchemeCase::Coprime : SchemeCase::Grouped;
      // Holds whenever i~ L <= K~; kept as an explicit guard for the
      // sub-key coverage argument.
      if (p.case_ == SchemeCase::Grouped && 2 * p.Ktilde_ < L + 1)
        throw bad("grouped key placement needs 2K~ >= L+1");
      break;
    }
  }

  const std::size_t sub = p.subpacketization();
  if (raw.F) {
    if (*raw.F == 0) throw bad("F must be positive");
    if (*raw.F % sub != 0)
      throw bad("F=" + std::to_string(*raw.F) + " is not divisible by " + std::to_string(sub) + " (required by the " +
                std::string(to_string(p.case_)) + " case)");
    p.F_ = *raw.F;
  } else {
    p.F_ = ((64 + sub - 1) / sub) * sub;
  }
  return p;
}

/// The L cache indices user k reads: k, <k+1>_K, ..., <k+L-1>_K.
inline std::vector<std::size_t> accessible_caches(const SystemParams& params, std::size_t k) {
  if (k < 1 || k > params.K())
    throw Error(Errc::IndexError, "user " + std::to_string(k) + " outside [1, " + std::to_string(params.K()) + "]");
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < params.L(); ++t)
    out.push_back(cyclic_index(static_cast<std::int64_t>(k + t), static_cast<std::int64_t>(params.K())));
  return out;
}

/// Per-cache memory in file units, split into data and key memory.
struct MemoryAccounting {
  Rational M;
  Rational M_D;
  Rational M_K;
};

inline MemoryAccounting memory_accounting(const SystemParams& p) {
  const auto K = static_cast<std::int64_t>(p.K());
  const auto L = static_cast<std::int64_t>(p.L());
  const auto N = static_cast<std::int64_t>(p.N());
  switch (p.scheme()) {
    case SchemeCase::FullKey: return {make_rational(1), make_rational(0), make_rational(1)};
    case SchemeCase::CodedPlacement: return {make_rational(N, L), make_rational(N, L), make_rational(0)};
    case SchemeCase::Coprime:
    case SchemeCase::Grouped: {
      const auto i = static_cast<std::int64_t>(*p.i());
      const Rational gap = make_rational(K - i * L, K);
      const Rational m_d = make_rational(i * N, K);
      const Rational coeff = p.scheme() == SchemeCase::Coprime
                                 ? make_rational(K, L)
                                 : make_rational(2 * K, static_cast<std::int64_t>(p.g()) * (L + 1));
      const Rational m_k = coeff * gap * gap;
      return {m_d + m_k, m_d, m_k};
    }
  }
  return {};
}

/// Lower bound on per-cache memory for any secure scheme (N >= K).
inline Rational min_secure_memory(std::size_t K, std::size_t N) {
  if (N < K) throw Error(Errc::BadParams, "the bound needs N >= K");
  return make_rational(1);
}

/// The server's N files of F bits each.
class FileLibrary {
 public:
  static FileLibrary generate(std::size_t N, std::size_t F, std::uint64_t seed) {
    FileLibrary lib;
    lib.seed_ = seed;
    for (std::size_t n = 0; n < N; ++n) {
      CounterRng rng(seed, StreamTag::File, n + 1);
      lib.files_.push_back(BitVector::random(F, rng));
    }
    return lib;
  }

  static FileLibrary from_files(std::vector<BitVector> files) {
    for (const auto& f : files)
      if (f.size() != files.front().size()) throw Error(Errc::LengthMismatch, "files differ in length");
    FileLibrary lib;
    lib.files_ = std::move(files);
    return lib;
  }

  std::size_t size() const noexcept { return files_.size(); }
  /// File n, 1-based.
  const BitVector& file(std::size_t n) const {
    if (n < 1 || n > files_.size()) throw Error(Errc::IndexError, "file " + std::to_string(n) + " out of range");
    return files_[n - 1];
  }
  const std::vector<BitVector>& files() const noexcept { return files_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }

  /// Subfile s (1-based) when every file is cut into `parts` equal pieces.
  BitVector subfile(std::size_t n, std::size_t s, std::size_t parts) const {
    const auto& f = file(n);
    const std::size_t len = f.size() / parts;
    return f.slice((s - 1) * len, len);
  }

 private:
  std::vector<BitVector> files_;
  std::optional<std::uint64_t> seed_;
};

inline FileLibrary generate_library(const SystemParams& p, std::uint64_t seed) {
  return FileLibrary::generate(p.N(), p.F(), seed);
}

/// d_1..d_K, each a 1-based file index.
struct DemandVector {
  std::vector<std::size_t> d;

  std::size_t operator[](std::size_t k) const { return d.at(k - 1); }
  std::size_t size() const noexcept { return d.size(); }
  friend bool operator==(const DemandVector&, const DemandVector&) = default;
};

inline DemandVector make_demand(const SystemParams& p, std::vector<std::size_t> d) {
  if (d.size() != p.K())
    throw Error(Errc::BadParams, "demand has " + std::to_string(d.size()) + " entries, expected K=" +
                                     std::to_string(p.K()));
  for (auto x : d)
    if (x < 1 || x > p.N()) throw Error(Errc::BadParams, "demanded file " + std::to_string(x) + " outside [1, N]");
  return DemandVector{std::move(d)};
}

inline DemandVector all_distinct_demand(const SystemParams& p) {
  std::vector<std::size_t> d(p.K());
  std::iota(d.begin(), d.end(), std::size_t{1});
  return make_demand(p, std::move(d));
}

/// Demand number `index` of the seeded random stream.
inline DemandVector random_demand(const SystemParams& p, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, StreamTag::Demand, index);
  std::vector<std::size_t> d(p.K());
  for (auto& x : d) x = static_cast<std::size_t>(rng.uniform(p.N())) + 1;
  return DemandVector{std::move(d)};
}

}  // namespace secmacc
