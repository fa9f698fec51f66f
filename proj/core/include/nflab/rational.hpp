#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace nflab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt factorial(std::uint64_t n) {
  BigInt f = 1;
  for (std::uint64_t i = 2; i <= n; ++i) f *= i;
  return f;
}

// Natural log of a positive big integer, exact to double precision even when
// the integer itself does not fit in a double.
inline double log_value(const BigInt& n) {
  if (n <= 0) throw std::domain_error("log_value: argument must be positive");
  const auto bits = msb(n);  // index of the highest set bit
  if (bits <= 52) return std::log(n.convert_to<double>());
  const unsigned shift = static_cast<unsigned>(bits - 52);
  const BigInt mantissa = n >> shift;
  return std::log(mantissa.convert_to<double>()) + shift * 0.6931471805599453;
}

inline double log_value(const Rational& q) {
  return log_value(numerator(q)) - log_value(denominator(q));
}

inline std::string to_fraction_string(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

}  // namespace nflab
