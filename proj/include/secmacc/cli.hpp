#pragma once

// Command implementations behind the secmacc executable. Each command takes
// a RunConfig plus output and diagnostic streams and returns the exit code,
// so the same code paths run from tests.
//
// Exit codes: 0 every verdict passed, 1 some verdict failed, 2 invalid
// parameters or usage, 3 instance too large for the requested analysis.

#include "secmacc/error.hpp"
#include "secmacc/rational.hpp"
#include "secmacc/security.hpp"
#include "secmacc/simulation.hpp"
#include "secmacc/system_model.hpp"
#include "secmacc/tradeoff.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace secmacc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitTooLarge = 3;

struct RunConfig {
  std::string command;
  std::optional<std::size_t> K, L, i;
  std::optional<std::size_t> N;        ///< nullopt: N = K
  std::optional<std::size_t> F;        ///< nullopt: auto
  std::optional<MemoryPoint> point;    ///< nullopt: uncoded when i is given
  std::uint64_t seed = 1;
  std::string demand = "random";       ///< random | all-distinct | exhaustive | comma-separated list
  std::optional<std::size_t> samples;  ///< per-command default when unset
  std::string out = ".";
  bool gap = false;
  unsigned workers = 0;  ///< 0: one per hardware thread
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end || v.empty())
    throw Error(Errc::BadParams, std::string(key) + ": expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

inline bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(Errc::BadParams, std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

inline std::vector<std::size_t> parse_list(std::string_view v) {
  std::vector<std::size_t> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(parse_number<std::size_t>("demand", trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace detail

/// Sets one key. Throws BadParams for unknown keys or malformed values.
inline void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  using detail::parse_number;
  value = detail::trim(value);
  if (key == "k") cfg.K = parse_number<std::size_t>(key, value);
  else if (key == "l") cfg.L = parse_number<std::size_t>(key, value);
  else if (key == "n") cfg.N = parse_number<std::size_t>(key, value);
  else if (key == "i") cfg.i = parse_number<std::size_t>(key, value);
  else if (key == "f") {
    if (value == "auto") cfg.F.reset();
    else cfg.F = parse_number<std::size_t>(key, value);
  } else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "demand") {
    if (value != "random" && value != "all-distinct" && value != "exhaustive") detail::parse_list(value);
    cfg.demand = std::string(value);
  } else if (key == "samples") cfg.samples = parse_number<std::size_t>(key, value);
  else if (key == "out") {
    if (value.empty()) throw Error(Errc::BadParams, "out: empty directory");
    cfg.out = std::string(value);
  } else if (key == "gap") cfg.gap = detail::parse_bool(key, value);
  else if (key == "scheme") {
    if (value == "full-key") cfg.point = MemoryPoint::FullKey;
    else if (value == "uncoded") cfg.point = MemoryPoint::Uncoded;
    else if (value == "coded") cfg.point = MemoryPoint::Coded;
    else if (value == "auto") cfg.point.reset();
    else throw Error(Errc::BadParams, "scheme: expected full-key, uncoded, coded or auto, got '" + std::string(value) + "'");
  } else if (key == "workers") cfg.workers = parse_number<unsigned>(key, value);
  else throw Error(Errc::BadParams, "unknown key '" + std::string(key) + "'");
}

/// Reads `key=value` lines; blank lines and `#` comments are skipped.
inline void apply_config(RunConfig& cfg, std::istream& in, const std::string& source = "config") {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = detail::trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    const auto where = source + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string_view::npos) throw Error(Errc::BadParams, where + "expected key=value");
    try {
      apply_setting(cfg, detail::trim(v.substr(0, eq)), v.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(Errc::BadParams, where + e.what());
    }
  }
}

inline void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadParams, "cannot read config file " + path.string());
  apply_config(cfg, in, path.string());
}

namespace detail {

inline std::size_t require(const std::optional<std::size_t>& v, const char* flag) {
  if (!v) throw Error(Errc::BadParams, std::string("missing --") + flag);
  return *v;
}

inline RawParams raw_params(const RunConfig& cfg) {
  RawParams raw;
  raw.K = require(cfg.K, "k");
  raw.L = require(cfg.L, "l");
  raw.N = cfg.N.value_or(raw.K);
  raw.F = cfg.F;
  if (cfg.point) raw.point = *cfg.point;
  else if (cfg.i) raw.point = MemoryPoint::Uncoded;
  else throw Error(Errc::BadParams, "missing --i (or choose --scheme full-key or --scheme coded)");
  if (raw.point == MemoryPoint::Uncoded) raw.i = require(cfg.i, "i");
  return raw;
}

inline DemandSpec demand_spec(const RunConfig& cfg, std::size_t default_samples) {
  DemandSpec spec;
  spec.samples = cfg.samples.value_or(default_samples);
  if (cfg.demand == "random") spec.mode = DemandMode::Random;
  else if (cfg.demand == "all-distinct") spec.mode = DemandMode::AllDistinct;
  else if (cfg.demand == "exhaustive") spec.mode = DemandMode::Exhaustive;
  else {
    spec.mode = DemandMode::Explicit;
    spec.explicit_d = parse_list(cfg.demand);
  }
  return spec;
}

inline std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out);
  const auto path = std::filesystem::path(cfg.out) / name;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::BadParams, "cannot write " + path.string());
  return os;
}

inline unsigned worker_count(const RunConfig& cfg) {
  if (cfg.workers) return cfg.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

inline std::string i_str(const SystemParams& p) { return p.i() ? std::to_string(*p.i()) : std::string(); }

}  // namespace detail

/// One placement and one delivery; writes placement_manifest.csv and
/// delivery_trace.csv and prints a summary line.
inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto p = validate_params(detail::raw_params(cfg));
  const auto spec = detail::demand_spec(cfg, 1);
  DemandVector d;
  switch (spec.mode) {
    case DemandMode::Explicit: d = make_demand(p, spec.explicit_d); break;
    case DemandMode::AllDistinct: d = all_distinct_demand(p); break;
    case DemandMode::Random: d = random_demand(p, cfg.seed, 0); break;
    case DemandMode::Exhaustive:
      throw Error(Errc::BadParams, "simulate runs one demand; use sweep for --demand exhaustive");
  }

  const auto lib = generate_library(p, cfg.seed);
  const auto pl = place(p, lib, cfg.seed);
  const auto res = run_delivery(pl, lib, d);
  const bool memory_ok = memory_matches(pl);
  const auto formula = formula_rate(p);
  {
    auto os = detail::open_output(cfg, "placement_manifest.csv");
    write_manifest(os, pl);
  }
  {
    auto os = detail::open_output(cfg, "delivery_trace.csv");
    write_trace(os, res.transmissions);
  }

  for (const auto& f : res.failures) err << "decode failure: " << f << '\n';
  for (const auto& f : res.audit.findings) err << "audit: " << f.detail << '\n';
  if (!memory_ok) err << "memory: a cache does not hold exactly M*F bits\n";

  const auto mem = memory_accounting(p);
  std::string demand_text;
  for (std::size_t k = 1; k <= d.size(); ++k) demand_text += (k > 1 ? "," : "") + std::to_string(d[k]);
  const bool pass = res.decoded() && res.audit.pass() && memory_ok && res.rate == formula;
  out << p.describe() << " demand=" << demand_text << " M=" << to_fraction(mem.M) << " M_D=" << to_fraction(mem.M_D)
      << " M_K=" << to_fraction(mem.M_K) << " transmissions=" << res.transmissions.size()
      << " rate=" << to_fraction(res.rate) << " formula=" << to_fraction(formula) << " decode "
      << (res.decoded() ? "OK" : "FAIL") << " audit " << (res.audit.pass() ? "OK" : "FAIL") << " memory "
      << (memory_ok ? "OK" : "FAIL") << '\n';
  return pass ? kExitOk : kExitFail;
}

inline void write_sweep_header(std::ostream& os) {
  os << "K,L,N,scheme,i,F,demands,passed,failed,rate_measured,rate_formula,memory_ok,audit_ok,verdict\n";
}

inline void write_sweep_row(std::ostream& os, const SweepRow& r) {
  const auto& p = r.params;
  os << p.K() << ',' << p.L() << ',' << p.N() << ',' << to_string(p.scheme()) << ',' << detail::i_str(p) << ','
     << p.F() << ',' << r.demands << ',' << r.passed << ',' << r.demands - r.passed << ',' << to_fraction(r.measured)
     << ',' << to_fraction(r.formula) << ',' << (r.memory_ok ? 1 : 0) << ',' << (r.audit_ok ? 1 : 0) << ','
     << (r.pass() ? "pass" : "fail") << '\n';
}

/// Every valid configuration with 2 <= K <= --k; writes sweep.csv.
/// --n fixes N (default N = K); --l, --i, --scheme and --f narrow the grid.
inline int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  SweepGrid grid;
  grid.max_K = detail::require(cfg.K, "k");
  grid.N = cfg.N;
  grid.L = cfg.L;
  grid.i = cfg.i;
  grid.point = cfg.point;
  grid.F = cfg.F;
  const auto spec = detail::demand_spec(cfg, 200);
  if (spec.mode == DemandMode::Explicit)
    throw Error(Errc::BadParams, "sweep takes --demand random, all-distinct or exhaustive");

  const auto configs = grid_configurations(grid);
  if (spec.mode == DemandMode::Exhaustive)
    for (const auto& p : configs)
      if (demand_space_size(p.K(), p.N()) > kMaxExhaustiveDemands)
        throw Error(Errc::TooLarge, "exhaustive demands need N^K <= 2^20; K=" + std::to_string(p.K()) +
                                        " N=" + std::to_string(p.N()) + " exceeds it");

  // Rows are computed in any order and written in grid order.
  std::vector<std::optional<SweepRow>> rows(configs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t n; (n = next.fetch_add(1)) < configs.size();)
      rows[n] = run_configuration(configs[n], spec, cfg.seed);
  };
  const unsigned workers = std::min<std::size_t>(detail::worker_count(cfg), std::max<std::size_t>(configs.size(), 1));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  auto os = detail::open_output(cfg, "sweep.csv");
  write_sweep_header(os);
  std::size_t failed = 0, demands = 0;
  for (const auto& r : rows) {
    write_sweep_row(os, *r);
    demands += r->demands;
    if (!r->pass()) {
      ++failed;
      err << "sweep: " << r->params.describe() << " failed";
      if (!r->first_failure.empty()) err << ": " << r->first_failure;
      err << '\n';
    }
  }
  out << "sweep configurations=" << rows.size() << " demands=" << demands << " passed=" << rows.size() - failed
      << " failed=" << failed << '\n';
  return failed == 0 ? kExitOk : kExitFail;
}

namespace detail {

/// Largest F the exhaustive oracle accepts for these parameters, if any.
inline std::optional<std::size_t> suggest_oracle_F(RawParams raw) {
  std::optional<std::size_t> best;
  for (std::size_t F = 1; raw.N * F <= kMaxFileBits; ++F) {
    raw.F = F;
    try {
      const auto p = validate_params(raw);
      if (p.key_count() * p.key_bits() <= kMaxKeyBits) best = F;
    } catch (const Error&) {
    }
  }
  return best;
}

}  // namespace detail

/// Mutual information between broadcast and library, keyed and unkeyed;
/// writes security_report.csv. Files are enumerated exhaustively when
/// N F <= 20 bits and sampled (--samples libraries) otherwise.
inline int cmd_security(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto raw = detail::raw_params(cfg);
  const auto p = validate_params(raw);
  auto spec = detail::demand_spec(cfg, 256);
  std::vector<DemandVector> demands;
  if (spec.mode == DemandMode::Random) {
    demands.push_back(random_demand(p, cfg.seed, 0));
  } else {
    if (spec.mode == DemandMode::Exhaustive && demand_space_size(p.K(), p.N()) > 4096)
      throw Error(Errc::TooLarge, "security with exhaustive demands is limited to N^K <= 4096");
    for_each_demand(p, spec, cfg.seed, [&](const DemandVector& d) { demands.push_back(d); });
  }

  const bool exhaustive = p.N() * p.F() <= kMaxFileBits;
  auto os = detail::open_output(cfg, "security_report.csv");
  write_oracle_header(os);
  bool all_pass = true;
  for (const auto& d : demands) {
    std::string tag;
    for (std::size_t k = 1; k <= d.size(); ++k) tag += (k > 1 ? "-" : "") + std::to_string(d[k]);
    for (const bool encrypt : {true, false}) {
      WiretapInstance inst{p, d, exhaustive ? EnumerationMode::ExhaustiveFiles : EnumerationMode::SampledFiles,
                           spec.samples, cfg.seed, encrypt};
      MutualInformation mi;
      try {
        mi = mutual_information_oracle(inst, detail::worker_count(cfg));
      } catch (const Error& e) {
        if (e.code() != Errc::TooLarge) throw;
        err << e.what() << '\n';
        if (const auto F = detail::suggest_oracle_F(raw))
          err << "try a smaller file size, e.g. --f " << *F << '\n';
        else
          err << "no file size fits the enumeration limits for this (K, L, N)\n";
        return kExitTooLarge;
      }
      // Unkeyed broadcasts should leak; an empty broadcast leaks nothing.
      const bool empty_delivery = formula_rate(p) == 0;
      const bool pass = encrypt || empty_delivery ? mi.independent : !mi.independent;
      all_pass = all_pass && pass;
      const std::string id = std::string(encrypt ? "secure" : "unkeyed") + ":" + tag;
      write_oracle_row(os, id, inst, mi, pass);
      out << id << (mi.exact ? " I=" + to_fraction(mi.bits) : " I~" + std::to_string(mi.approx)) << ' '
          << (pass ? "pass" : "fail") << '\n';
    }
  }
  return all_pass ? kExitOk : kExitFail;
}

/// Writes curve.csv (corner points, envelope samples, insecure baseline)
/// and with --gap also gap.csv.
inline int cmd_tradeoff(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::size_t K = detail::require(cfg.K, "k"), L = detail::require(cfg.L, "l"), N = cfg.N.value_or(K);
  if (cfg.gap) secmacc::detail::check_gap_domain(K, L, N);
  const auto corners = corner_points(K, L, N);
  const auto secure = envelope(corners);
  const auto insecure_pts = insecure_corner_points(K, L, N);
  const auto insecure = envelope(insecure_pts);
  constexpr std::int64_t steps = 64;
  {
    auto os = detail::open_output(cfg, "curve.csv");
    write_curve_header(os);
    for (const auto& c : corners) write_curve_row(os, K, L, N, "secure", c.M, c.R, true);
    const Rational s_lo = secure.min_memory(), s_hi = secure.max_memory();
    for (std::int64_t s = 0; s <= steps; ++s) {
      const Rational M = s_lo + (s_hi - s_lo) * make_rational(s, steps);
      write_curve_row(os, K, L, N, "secure", M, secure.evaluate(M), false);
    }
    for (const auto& c : insecure_pts) write_curve_row(os, K, L, N, "insecure", c.M, c.R, true);
    const Rational i_hi = insecure.max_memory();
    for (std::int64_t s = 0; s <= steps; ++s) {
      const Rational M = i_hi * make_rational(s, steps);
      write_curve_row(os, K, L, N, "insecure", M, insecure.evaluate(M), false);
    }
  }
  for (const auto& c : corners) {
    out << "corner " << to_string(c.scheme);
    if (c.i) out << " i=" << *c.i;
    out << " M=" << to_fraction(c.M) << " (" << to_decimal(c.M) << ") R=" << to_fraction(c.R) << " ("
        << to_decimal(c.R) << ")\n";
  }
  if (!cfg.gap) return kExitOk;

  const auto memories = gap_memory_samples(K, L, N, cfg.samples.value_or(50), cfg.seed);
  const auto ev = evaluate_gap(K, L, N, memories);
  {
    auto os = detail::open_output(cfg, "gap.csv");
    write_gap_header(os);
    write_gap_rows(os, ev);
  }
  Rational worst = 0;
  std::size_t failed = 0;
  for (const auto& s : ev.samples) {
    if (s.ratio > worst) worst = s.ratio;
    if (!s.pass) {
      ++failed;
      err << "gap: M=" << to_fraction(s.M) << " ratio " << to_fraction(s.ratio) << " exceeds "
          << to_fraction(ev.bound) << '\n';
    }
  }
  out << "gap samples=" << ev.samples.size() << " max_ratio=" << to_fraction(worst) << " (" << to_decimal(worst)
      << ") bound=" << to_fraction(ev.bound) << " failed=" << failed << '\n'
      << "conditional: if the insecure baseline is within a factor 2 of the optimum, the secure rate is within "
      << to_fraction(ev.optimal_bound) << " of it\n";
  return failed == 0 ? kExitOk : kExitFail;
}

/// Dispatches on cfg.command and maps errors to exit codes.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "simulate") return cmd_simulate(cfg, out, err);
    if (cfg.command == "sweep") return cmd_sweep(cfg, out, err);
    if (cfg.command == "security") return cmd_security(cfg, out, err);
    if (cfg.command == "tradeoff") return cmd_tradeoff(cfg, out, err);
    err << "unknown command '" << cfg.command << "'\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return e.code() == Errc::TooLarge ? kExitTooLarge : kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace secmacc::cli
