#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>

namespace secmacc {

/// Exact rational used for every memory, rate and probability value.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

inline std::string num_str(const Rational& r) { return boost::multiprecision::numerator(r).str(); }
inline std::string den_str(const Rational& r) { return boost::multiprecision::denominator(r).str(); }

/// "p/q", or "p" when the denominator is one.
inline std::string to_fraction(const Rational& r) {
  auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num_str(r);
  return num_str(r) + "/" + den.str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string to_decimal(const Rational& r, int places = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(places) << to_double(r);
  return os.str();
}

}  // namespace secmacc
