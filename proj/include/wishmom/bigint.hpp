#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "wishmom/errors.hpp"

namespace wishmom {

// All counts and polynomial coefficients are exact; the double factorials
// involved overflow 64-bit integers long before the enumeration cap is hit.
using BigInt = boost::multiprecision::cpp_int;

inline BigInt factorial(int n) {
  if (n < 0) throw DomainError("factorial: negative argument");
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Convention (-1)!! = 1.
inline BigInt double_factorial(int n) {
  if (n < -1) throw DomainError("double_factorial: argument below -1");
  BigInt r = 1;
  for (int i = n; i >= 2; i -= 2) r *= i;
  return r;
}

inline BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (int i = 0; i < k; ++i) {
    r *= n - i;
    r /= i + 1;
  }
  return r;
}

inline BigInt pow_int(const BigInt& base, int exp) {
  if (exp < 0) throw DomainError("pow_int: negative exponent");
  BigInt r = 1, b = base;
  while (exp > 0) {
    if (exp & 1) r *= b;
    b *= b;
    exp >>= 1;
  }
  return r;
}

inline double to_double(const BigInt& x) { return x.convert_to<double>(); }

}  // namespace wishmom
