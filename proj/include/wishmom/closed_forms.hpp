#pragma once

#include <compare>
#include <map>
#include <vector>

#include "wishmom/bigint.hpp"
#include "wishmom/combinatorics.hpp"
#include "wishmom/errors.hpp"
#include "wishmom/nu_polynomial.hpp"

namespace wishmom {

/**
 * Exact polynomial in (nu, rho^2, delta) with nonnegative integer
 * coefficients; each closed form uses the variables it needs and leaves the
 * other exponents at zero.
 */
class BivariateMomentPoly {
 public:
  struct Key {
    int nu_exp = 0;
    int rho2_exp = 0;
    int delta_exp = 0;

    auto operator<=>(const Key&) const = default;
  };

  void add(const Key& key, const BigInt& coeff) {
    if (coeff == 0) return;
    BigInt& slot = terms_[key];
    slot += coeff;
    if (slot == 0) terms_.erase(key);
  }

  const std::map<Key, BigInt>& terms() const { return terms_; }

  BigInt coeff(int nu_exp, int rho2_exp, int delta_exp) const {
    auto it = terms_.find(Key{nu_exp, rho2_exp, delta_exp});
    return it == terms_.end() ? BigInt(0) : it->second;
  }

  // Collects the coefficient of rho^(2 rho2_exp) delta^delta_exp as a
  // polynomial in nu.
  NuPolynomial nu_slice(int rho2_exp, int delta_exp) const {
    NuPolynomial out;
    for (const auto& [key, c] : terms_)
      if (key.rho2_exp == rho2_exp && key.delta_exp == delta_exp)
        out += NuPolynomial::monomial(key.nu_exp, c);
    return out;
  }

  int max_rho2_exp() const {
    int m = 0;
    for (const auto& [key, c] : terms_) m = std::max(m, key.rho2_exp);
    return m;
  }

  int max_delta_exp() const {
    int m = 0;
    for (const auto& [key, c] : terms_) m = std::max(m, key.delta_exp);
    return m;
  }

  double eval(double nu, double rho2, double delta) const {
    double acc = 0.0;
    for (const auto& [key, c] : terms_) {
      double v = to_double(c);
      for (int k = 0; k < key.nu_exp; ++k) v *= nu;
      for (int k = 0; k < key.rho2_exp; ++k) v *= rho2;
      for (int k = 0; k < key.delta_exp; ++k) v *= delta;
      acc += v;
    }
    return acc;
  }

  bool operator==(const BivariateMomentPoly&) const = default;

 private:
  std::map<Key, BigInt> terms_;
};

namespace detail {

inline NuPolynomial rising_even_product(int count, int top) {
  // prod_{i=1..count} (nu + 2(top - i))
  NuPolynomial p = NuPolynomial::constant(1);
  for (int i = 1; i <= count; ++i) p *= NuPolynomial{BigInt(2 * (top - i)), BigInt(1)};
  return p;
}

inline NuPolynomial rising_product(int count, int top) {
  // prod_{i=1..count} (nu + top - i)
  NuPolynomial p = NuPolynomial::constant(1);
  for (int i = 1; i <= count; ++i) p *= NuPolynomial{BigInt(top - i), BigInt(1)};
  return p;
}

inline void add_nu_poly(BivariateMomentPoly& out, const NuPolynomial& p,
                        const BigInt& scale, int rho2_exp, int delta_exp) {
  for (int l = 0; l <= p.degree(); ++l)
    out.add({l, rho2_exp, delta_exp}, p.coeff(l) * scale);
}

}  // namespace detail

// nth moment of the noncentral chi-square with nu degrees of freedom and
// noncentrality delta: sum_m binom(n,m) prod_{i=1..m}(nu+2(n-i)) delta^(n-m).
inline BivariateMomentPoly noncentral_chisq_moment(int n) {
  if (n < 1) throw DomainError("noncentral_chisq_moment: n must be >= 1");
  BivariateMomentPoly out;
  for (int m = 0; m <= n; ++m)
    detail::add_nu_poly(out, phi(m, n), 1, 0, n - m);
  return out;
}

/**
 * Coefficient of x^k in the Laguerre polynomial, as a polynomial in nu.
 * The normalization is the chi-square one: the Laguerre polynomial is
 * formally the nth moment of a chi-square with noncentrality -x, up to the
 * sign (-1)^n, so the coefficient of x^(n-m) is
 * (-1)^m binom(n,m) prod_{i=1..m}(nu+2(n-i)).
 */
inline std::vector<NuPolynomial> laguerre_coeffs(int n) {
  if (n < 0) throw DomainError("laguerre_coeffs: n must be >= 0");
  std::vector<NuPolynomial> coeffs(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) {
    NuPolynomial p = detail::rising_even_product(m, n).scaled(binomial(n, m));
    coeffs[static_cast<std::size_t>(n - m)] = (m % 2 == 0) ? p : p.scaled(-1);
  }
  return coeffs;
}

inline double laguerre_eval(int n, double nu, double x) {
  auto coeffs = laguerre_coeffs(n);
  double acc = 0.0;
  for (int k = n; k >= 0; --k) acc = acc * x + coeffs[static_cast<std::size_t>(k)].eval(nu);
  return acc;
}

// Probabilists' Hermite polynomial coefficients via the pairing count
// a_{m,n} = n! / ((n-2m)! 2^m m!): H_n(x) = sum_m a_{m,n} (-1)^m x^(n-2m).
inline std::vector<BigInt> hermite_coeffs(int n) {
  if (n < 0) throw DomainError("hermite_coeffs: n must be >= 0");
  std::vector<BigInt> coeffs(static_cast<std::size_t>(n) + 1, BigInt(0));
  for (int m = 0; 2 * m <= n; ++m) {
    BigInt a = factorial(n) / (factorial(n - 2 * m) * pow_int(2, m) * factorial(m));
    coeffs[static_cast<std::size_t>(n - 2 * m)] = (m % 2 == 0) ? a : -a;
  }
  return coeffs;
}

/**
 * Mixed moment E[w11^b w22^c] of Kibble's bivariate chi-square (the
 * diagonal of a 2x2 central Wishart with unit variances and correlation
 * rho), exact in (nu, rho^2).
 */
inline BivariateMomentPoly kibble_moment(int b, int c) {
  if (b < 0 || c < 0) throw DomainError("kibble_moment: exponents must be >= 0");
  BivariateMomentPoly out;
  for (int a = 0; a <= std::min(b, c); ++a) {
    BigInt scale = pow_int(2, a) * factorial(b) * factorial(c) /
                   (factorial(b - a) * factorial(c - a) * factorial(a));
    NuPolynomial p = detail::rising_even_product(a, a) *
                     detail::rising_even_product(b - a, b) *
                     detail::rising_even_product(c - a, c);
    detail::add_nu_poly(out, p, scale, a, 0);
  }
  return out;
}

// E[w12^(2a) w11^b w22^c] for the 2x2 central real Wishart with Sigma = I;
// `a` is half the w12 exponent.
inline NuPolynomial real_2x2_moment(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0)
    throw DomainError("real_2x2_moment: exponents must be >= 0");
  NuPolynomial p = NuPolynomial::constant(double_factorial(2 * a - 1));
  p *= detail::rising_even_product(a, a);
  p *= detail::rising_even_product(b, a + b);
  p *= detail::rising_even_product(c, a + c);
  return p;
}

// Any odd w12 power has moment exactly zero (sign-flip symmetry).
inline bool real_2x2_vanishes(int w12_exponent) { return w12_exponent % 2 != 0; }

// E[w12^e w11^b w22^c] with the raw w12 exponent; odd e gives the zero
// polynomial rather than an error.
inline NuPolynomial real_2x2_moment_of_exponent(int e, int b, int c) {
  if (e < 0) throw DomainError("real_2x2_moment_of_exponent: exponent must be >= 0");
  if (real_2x2_vanishes(e)) return NuPolynomial::zero();
  return real_2x2_moment(e / 2, b, c);
}

// E[w11^b (w12 w21)^a w22^c] for the 2x2 central complex Wishart, Sigma = I.
inline NuPolynomial complex_2x2_moment(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0)
    throw DomainError("complex_2x2_moment: exponents must be >= 0");
  NuPolynomial p = NuPolynomial::constant(factorial(a));
  p *= detail::rising_product(a, a);
  p *= detail::rising_product(b, a + b);
  p *= detail::rising_product(c, a + c);
  return p;
}

// Unbalanced powers of w12 and w21 have moment exactly zero (phase
// rotation symmetry).
inline bool complex_2x2_vanishes(int w12_exponent, int w21_exponent) {
  return w12_exponent != w21_exponent;
}

inline NuPolynomial complex_2x2_moment_of_exponents(int a12, int a21, int b, int c) {
  if (a12 < 0 || a21 < 0)
    throw DomainError("complex_2x2_moment_of_exponents: exponents must be >= 0");
  if (complex_2x2_vanishes(a12, a21)) return NuPolynomial::zero();
  return complex_2x2_moment(a12, b, c);
}

}  // namespace wishmom
