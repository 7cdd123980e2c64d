#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace charvar {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline BigInt pow_big(const BigInt& base, unsigned exp) {
  return boost::multiprecision::pow(base, exp);
}

inline std::string to_decimal(const BigInt& v) { return v.str(); }

inline bool is_integer(const BigRational& r) {
  return boost::multiprecision::denominator(r) == 1;
}

inline BigInt numerator_of(const BigRational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const BigRational& r) { return boost::multiprecision::denominator(r); }

inline std::string to_decimal(const BigRational& r) {
  if (is_integer(r)) return numerator_of(r).str();
  return numerator_of(r).str() + "/" + denominator_of(r).str();
}

inline BigInt gcd_big(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::gcd(a, b);
}

}  // namespace charvar
