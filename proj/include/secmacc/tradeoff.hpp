#pragma once

#include "secmacc/error.hpp"
#include "secmacc/random.hpp"
#include "secmacc/rational.hpp"
#include "secmacc/system_model.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace secmacc {

struct CornerPoint {
  Rational M;
  Rational R;
  SchemeCase scheme = SchemeCase::FullKey;
  std::optional<std::size_t> i;
};

namespace detail {
inline void check_klN(std::size_t K, std::size_t L, std::size_t N) {
  if (L < 1 || L >= K) throw Error(Errc::BadParams, "need 1 <= L < K");
  if (N < K) throw Error(Errc::BadParams, "need N >= K");
}
inline Rational uncoded_rate(std::int64_t K, std::int64_t L, std::int64_t i) {
  if (i * L >= K) return make_rational(0);
  const Rational gap = make_rational(K - i * L, K);
  return make_rational(K) * gap * gap;
}
}  // namespace detail

/// Securely achievable corner points: (1, K), one point per i with iL <= K,
/// and (N/L, 0).
inline std::vector<CornerPoint> corner_points(std::size_t K, std::size_t L, std::size_t N) {
  detail::check_klN(K, L, N);
  std::vector<CornerPoint> pts;
  pts.push_back({make_rational(1), make_rational(static_cast<std::int64_t>(K)), SchemeCase::FullKey, std::nullopt});
  for (std::size_t i = 1; i * L <= K; ++i) {
    const auto p = validate_params({K, L, N, i, std::nullopt, MemoryPoint::Uncoded});
    pts.push_back({memory_accounting(p).M, detail::uncoded_rate(K, L, i), p.scheme(), i});
  }
  pts.push_back({make_rational(static_cast<std::int64_t>(N), static_cast<std::int64_t>(L)), make_rational(0),
                 SchemeCase::CodedPlacement, std::nullopt});
  return pts;
}

/// Piecewise-linear lower convex envelope through its vertices, ordered by
/// increasing M with strictly decreasing R. Flat beyond the last vertex.
class RateCurve {
 public:
  explicit RateCurve(std::vector<CornerPoint> vertices) : vertices_(std::move(vertices)) {}

  const std::vector<CornerPoint>& vertices() const noexcept { return vertices_; }
  const Rational& min_memory() const { return vertices_.front().M; }
  const Rational& max_memory() const { return vertices_.back().M; }

  Rational evaluate(const Rational& M) const {
    if (M < min_memory())
      throw Error(Errc::BadParams, "memory " + to_fraction(M) + " below the curve's first point " +
                                       to_fraction(min_memory()));
    if (M >= max_memory()) return vertices_.back().R;
    auto hi = std::upper_bound(vertices_.begin(), vertices_.end(), M,
                               [](const Rational& m, const CornerPoint& p) { return m < p.M; });
    auto lo = hi - 1;
    return lo->R + (hi->R - lo->R) * (M - lo->M) / (hi->M - lo->M);
  }

 private:
  std::vector<CornerPoint> vertices_;
};

/// Lower convex envelope of achievable (M, R) pairs; points above it or to
/// the right of the minimum rate are dropped.
inline RateCurve envelope(std::vector<CornerPoint> points) {
  if (points.empty()) throw Error(Errc::BadParams, "envelope of no points");
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    return a.M < b.M || (a.M == b.M && a.R < b.R);
  });
  std::vector<CornerPoint> unique;
  for (auto& p : points)
    if (unique.empty() || unique.back().M != p.M) unique.push_back(std::move(p));

  auto cross = [](const CornerPoint& a, const CornerPoint& b, const CornerPoint& c) {
    return (b.M - a.M) * (c.R - a.R) - (b.R - a.R) * (c.M - a.M);
  };
  std::vector<CornerPoint> hull;
  for (auto& p : unique) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0) hull.pop_back();
    hull.push_back(std::move(p));
  }
  auto best = std::min_element(hull.begin(), hull.end(), [](const auto& a, const auto& b) { return a.R < b.R; });
  hull.erase(best + 1, hull.end());
  return RateCurve(std::move(hull));
}

/// Insecure uncoded baseline corners: (0, K) and (iN/K, K(1 - iL/K)^2) for
/// i = 1..ceil(K/L), the rate clamped to 0 once iL >= K.
inline std::vector<CornerPoint> insecure_corner_points(std::size_t K, std::size_t L, std::size_t N) {
  detail::check_klN(K, L, N);
  std::vector<CornerPoint> pts;
  const auto k = static_cast<std::int64_t>(K);
  pts.push_back({make_rational(0), make_rational(k), SchemeCase::Coprime, std::nullopt});
  for (std::size_t i = 1; i <= (K + L - 1) / L; ++i)
    pts.push_back({make_rational(static_cast<std::int64_t>(i * N), k),
                   detail::uncoded_rate(k, static_cast<std::int64_t>(L), static_cast<std::int64_t>(i)),
                   std::gcd(K, i) == 1 ? SchemeCase::Coprime : SchemeCase::Grouped, i});
  return pts;
}

inline Rational insecure_baseline(std::size_t K, std::size_t L, std::size_t N, const Rational& M) {
  if (M < 0) throw Error(Errc::BadParams, "memory must be non-negative");
  return envelope(insecure_corner_points(K, L, N)).evaluate(M);
}

/// Secure points using uncoded data only: (1, K), every uncoded corner, and
/// rate 0 at ceil(K/L) N/K where each user already sees every subfile.
inline std::vector<CornerPoint> secure_uncoded_points(std::size_t K, std::size_t L, std::size_t N) {
  auto pts = corner_points(K, L, N);
  pts.pop_back();
  const std::size_t full = (K + L - 1) / L;
  pts.push_back({make_rational(static_cast<std::int64_t>(full * N), static_cast<std::int64_t>(K)), make_rational(0),
                 std::gcd(K, full) == 1 ? SchemeCase::Coprime : SchemeCase::Grouped, full});
  return pts;
}

struct GapSample {
  Rational M;
  Rational secure_rate;
  Rational insecure_rate;
  Rational ratio;  ///< secure / insecure, 1 when both are 0
  bool pass = true;
};

/// Ratio of the secure rate to the insecure baseline over 1 <= M <= 2N/K
/// for L >= K/2, N >= 2K.
struct GapEvaluation {
  std::size_t K = 0, L = 0, N = 0;
  Rational beta;  ///< (1 - L/K)^2
  Rational t;     ///< N/K - 1
  Rational bound;          ///< 3 if 2K <= N < 3K, else 2
  Rational optimal_bound;  ///< 2 x bound, conditional on the baseline being within 2 of optimal
  std::vector<GapSample> samples;

  bool pass() const {
    return std::all_of(samples.begin(), samples.end(), [](const auto& s) { return s.pass; });
  }
};

namespace detail {
inline void check_gap_domain(std::size_t K, std::size_t L, std::size_t N) {
  check_klN(K, L, N);
  if (2 * L < K) throw Error(Errc::BadParams, "gap bounds need L >= K/2 (L=" + std::to_string(L) + ", K=" + std::to_string(K) + ")");
  if (N < 2 * K) throw Error(Errc::BadParams, "gap bounds need N >= 2K (N=" + std::to_string(N) + ", K=" + std::to_string(K) + ")");
}
}  // namespace detail

/// `count` memory values in [1, 2N/K]: both endpoints, the breakpoints
/// N/K and N/K + (K/L)(1-L/K)^2, then seeded uniform values on a 2^-16 grid.
inline std::vector<Rational> gap_memory_samples(std::size_t K, std::size_t L, std::size_t N, std::size_t count,
                                                std::uint64_t seed) {
  detail::check_gap_domain(K, L, N);
  const auto k = static_cast<std::int64_t>(K), l = static_cast<std::int64_t>(L), n = static_cast<std::int64_t>(N);
  const Rational lo = make_rational(1), hi = make_rational(2 * n, k);
  const Rational beta = make_rational(k - l, k) * make_rational(k - l, k);
  std::vector<Rational> fixed = {lo, hi, make_rational(n, k), make_rational(n, k) + make_rational(k, l) * beta};
  std::vector<Rational> out;
  for (std::size_t s = 0; s < std::min(count, fixed.size()); ++s) out.push_back(fixed[s]);
  CounterRng rng(seed, StreamTag::Sample, K * 1000003 + L * 1009 + N);
  constexpr std::int64_t grid = 1 << 16;
  while (out.size() < count) {
    const auto u = static_cast<std::int64_t>(rng.uniform(grid + 1));
    out.push_back(lo + (hi - lo) * make_rational(u, grid));
  }
  return out;
}

inline GapEvaluation evaluate_gap(std::size_t K, std::size_t L, std::size_t N, std::span<const Rational> memories) {
  detail::check_gap_domain(K, L, N);
  const auto k = static_cast<std::int64_t>(K), l = static_cast<std::int64_t>(L), n = static_cast<std::int64_t>(N);
  GapEvaluation ev;
  ev.K = K;
  ev.L = L;
  ev.N = N;
  ev.beta = make_rational(k - l, k) * make_rational(k - l, k);
  ev.t = make_rational(n, k) - 1;
  ev.bound = N < 3 * K ? make_rational(3) : make_rational(2);
  ev.optimal_bound = 2 * ev.bound;

  const auto secure = envelope(secure_uncoded_points(K, L, N));
  const auto insecure = envelope(insecure_corner_points(K, L, N));
  const Rational hi = make_rational(2 * n, k);
  for (const auto& M : memories) {
    if (M < 1 || M > hi)
      throw Error(Errc::BadParams, "memory " + to_fraction(M) + " outside [1, 2N/K]");
    GapSample s;
    s.M = M;
    s.secure_rate = secure.evaluate(M);
    s.insecure_rate = insecure.evaluate(M);
    if (s.insecure_rate == 0)
      s.ratio = s.secure_rate == 0 ? make_rational(1) : make_rational(-1);
    else
      s.ratio = s.secure_rate / s.insecure_rate;
    s.pass = s.ratio >= 0 && s.ratio <= ev.bound;
    ev.samples.push_back(std::move(s));
  }
  return ev;
}

/// evaluate_gap, raising BoundViolated if any sample breaks the bound.
inline GapEvaluation gap_check(std::size_t K, std::size_t L, std::size_t N, std::span<const Rational> memories) {
  auto ev = evaluate_gap(K, L, N, memories);
  for (const auto& s : ev.samples)
    if (!s.pass)
      throw Error(Errc::BoundViolated, "K=" + std::to_string(K) + " L=" + std::to_string(L) + " N=" +
                                           std::to_string(N) + " M=" + to_fraction(s.M) + ": ratio " +
                                           to_fraction(s.ratio) + " exceeds " + to_fraction(ev.bound));
  return ev;
}

/// Curve CSV header. The first nine columns are the contract; the two
/// decimal columns follow.
inline void write_curve_header(std::ostream& os) {
  os << "K,L,N,scheme,M_num,M_den,R_num,R_den,corner_flag,M_decimal,R_decimal\n";
}

inline void write_curve_row(std::ostream& os, std::size_t K, std::size_t L, std::size_t N, std::string_view scheme,
                            const Rational& M, const Rational& R, bool corner) {
  os << K << ',' << L << ',' << N << ',' << scheme << ',' << num_str(M) << ',' << den_str(M) << ',' << num_str(R)
     << ',' << den_str(R) << ',' << (corner ? 1 : 0) << ',' << to_decimal(M) << ',' << to_decimal(R) << '\n';
}

/// Gap CSV header; M and ratio are exact fractions, decimals follow.
inline void write_gap_header(std::ostream& os) {
  os << "K,L,N,M,ratio,bound,pass,M_decimal,ratio_decimal,optimal_bound_conditional\n";
}

inline void write_gap_rows(std::ostream& os, const GapEvaluation& ev) {
  for (const auto& s : ev.samples)
    os << ev.K << ',' << ev.L << ',' << ev.N << ',' << to_fraction(s.M) << ',' << to_fraction(s.ratio) << ','
       << to_fraction(ev.bound) << ',' << (s.pass ? "pass" : "fail") << ',' << to_decimal(s.M) << ','
       << to_decimal(s.ratio) << ',' << to_fraction(ev.optimal_bound) << '\n';
}

}  // namespace secmacc
