#pragma once

// End-to-end runs: placement, delivery, decoding at every user, rate and
// memory checks, and the one-time-pad audit.

#include "secmacc/delivery.hpp"
#include "secmacc/placement.hpp"
#include "secmacc/security.hpp"
#include "secmacc/system_model.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace secmacc {

struct DeliveryOutcome {
  std::vector<Transmission> transmissions;
  Rational rate;
  std::size_t users_ok = 0;
  std::vector<std::string> failures;
  AuditReport audit;

  bool decoded() const noexcept { return failures.empty(); }
};

/// Runs one demand against a fixed placement and checks every user.
/// In the coded case every user must rebuild all N files.
inline DeliveryOutcome run_delivery(const Placement& pl, const FileLibrary& lib, const DemandVector& d) {
  const auto& p = pl.params;
  DeliveryOutcome out;
  out.transmissions = encode_deliver(pl, lib, d);
  out.rate = measured_rate(out.transmissions, p.F());
  out.audit = structural_audit(out.transmissions, pl.keys);
  for (std::size_t k = 1; k <= p.K(); ++k) {
    try {
      bool ok = decode_user(pl, out.transmissions, d, k) == lib.file(d[k]);
      if (ok && p.scheme() == SchemeCase::CodedPlacement) ok = recover_all_files_coded(pl, k) == lib.files();
      if (ok)
        ++out.users_ok;
      else
        out.failures.push_back("user " + std::to_string(k) + ": decoded file differs from W" + std::to_string(d[k]));
    } catch (const Error& e) {
      out.failures.push_back(e.what());
    }
  }
  return out;
}

/// True iff every cache holds exactly M F bits.
inline bool memory_matches(const Placement& pl) {
  const Rational expected = memory_accounting(pl.params).M * make_rational(static_cast<std::int64_t>(pl.params.F()));
  for (const auto& c : pl.caches)
    if (make_rational(static_cast<std::int64_t>(c.bit_count())) != expected) return false;
  return true;
}

enum class DemandMode { Random, AllDistinct, Exhaustive, Explicit };

struct DemandSpec {
  DemandMode mode = DemandMode::Random;
  std::size_t samples = 200;           ///< Random: count of random vectors (the all-distinct one is added)
  std::vector<std::size_t> explicit_d;  ///< Explicit only
};

inline constexpr std::uint64_t kMaxExhaustiveDemands = std::uint64_t{1} << 20;

/// N^K, saturating above the exhaustive limit.
inline std::uint64_t demand_space_size(std::size_t K, std::size_t N) {
  std::uint64_t n = 1;
  for (std::size_t k = 0; k < K; ++k) {
    n *= N;
    if (n > kMaxExhaustiveDemands) return kMaxExhaustiveDemands + 1;
  }
  return n;
}

/// Calls `visit` on every demand vector selected by `spec` (a DemandSpec), in a fixed order.
inline void for_each_demand(const SystemParams& p, const DemandSpec& spec, std::uint64_t seed,
                            const std::function<void(const DemandVector&)>& visit) {
  switch (spec.mode) {
    case DemandMode::Explicit: visit(make_demand(p, spec.explicit_d)); return;
    case DemandMode::AllDistinct: visit(all_distinct_demand(p)); return;
    case DemandMode::Random:
      for (std::size_t s = 0; s < spec.samples; ++s) visit(random_demand(p, seed, s));
      visit(all_distinct_demand(p));
      return;
    case DemandMode::Exhaustive: {
      const auto total = demand_space_size(p.K(), p.N());
      if (total > kMaxExhaustiveDemands)
        throw Error(Errc::TooLarge, "exhaustive demands need N^K <= 2^20");
      std::vector<std::size_t> d(p.K(), 1);
      for (std::uint64_t n = 0; n < total; ++n) {
        visit(DemandVector{d});
        for (std::size_t k = p.K(); k-- > 0;) {
          if (++d[k] <= p.N()) break;
          d[k] = 1;
        }
      }
      return;
    }
  }
}

struct SweepRow {
  SystemParams params;
  std::size_t demands = 0;
  std::size_t passed = 0;
  Rational measured;  ///< rate of the last demand; every demand must agree
  Rational formula;
  bool rates_agree = true;
  bool memory_ok = true;
  bool audit_ok = true;
  std::string first_failure;

  bool pass() const { return passed == demands && rates_agree && memory_ok && audit_ok; }
};

inline SweepRow run_configuration(const SystemParams& p, const DemandSpec& spec, std::uint64_t seed) {
  const auto lib = generate_library(p, seed);
  const auto pl = place(p, lib, seed);
  SweepRow row{p, 0, 0, {}, {}, true, true, true, {}};
  row.formula = formula_rate(p);
  row.memory_ok = memory_matches(pl);
  for_each_demand(p, spec, seed, [&](const DemandVector& d) {
    const auto out = run_delivery(pl, lib, d);
    ++row.demands;
    if (out.decoded()) ++row.passed;
    else if (row.first_failure.empty()) row.first_failure = out.failures.front();
    row.measured = out.rate;
    if (out.rate != row.formula) row.rates_agree = false;
    if (!out.audit.pass()) row.audit_ok = false;
  });
  return row;
}

struct SweepGrid {
  std::size_t max_K = 0;
  std::optional<std::size_t> N;  ///< nullopt: N = K
  std::optional<std::size_t> L;
  std::optional<std::size_t> i;
  std::optional<MemoryPoint> point;  ///< nullopt: all points
  std::optional<std::size_t> F;      ///< nullopt: auto; configurations it does not fit are skipped

  static SweepGrid up_to(std::size_t max_K) {
    SweepGrid g;
    g.max_K = max_K;
    return g;
  }
};

/// Every valid configuration of the grid in (K, L, point, i) order.
inline std::vector<SystemParams> grid_configurations(const SweepGrid& grid) {
  std::vector<SystemParams> out;
  auto add = [&](const RawParams& raw) {
    try {
      out.push_back(validate_params(raw));
    } catch (const Error&) {
      // configuration outside the grid's valid region
    }
  };
  for (std::size_t K = 2; K <= grid.max_K; ++K) {
    const std::size_t N = grid.N ? *grid.N : K;
    if (N < K) continue;
    for (std::size_t L = 1; L < K; ++L) {
      if (grid.L && *grid.L != L) continue;
      if (!grid.point || *grid.point == MemoryPoint::FullKey)
        if (!grid.i) add({K, L, N, std::nullopt, grid.F, MemoryPoint::FullKey});
      if (!grid.point || *grid.point == MemoryPoint::Uncoded)
        for (std::size_t i = 1; i * L <= K; ++i)
          if (!grid.i || *grid.i == i) add({K, L, N, i, grid.F, MemoryPoint::Uncoded});
      if (!grid.point || *grid.point == MemoryPoint::Coded)
        if (!grid.i) add({K, L, N, std::nullopt, grid.F, MemoryPoint::Coded});
    }
  }
  return out;
}

}  // namespace secmacc
