#pragma once

#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wishmom/bigint.hpp"

namespace wishmom {

/**
 * Univariate polynomial in the degrees-of-freedom indeterminate with exact
 * integer coefficients.  Index k of the coefficient vector is the exponent.
 * The zero polynomial is the empty coefficient vector; otherwise the leading
 * coefficient is nonzero.
 */
class NuPolynomial {
 public:
  NuPolynomial() = default;

  explicit NuPolynomial(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) {
    trim();
  }

  NuPolynomial(std::initializer_list<BigInt> coeffs)
      : coeffs_(coeffs.begin(), coeffs.end()) {
    trim();
  }

  static NuPolynomial zero() { return NuPolynomial(); }

  static NuPolynomial constant(BigInt c) {
    NuPolynomial p;
    if (c != 0) p.coeffs_.push_back(std::move(c));
    return p;
  }

  // c * nu^k
  static NuPolynomial monomial(int k, BigInt c) {
    NuPolynomial p;
    if (c != 0) {
      p.coeffs_.assign(static_cast<std::size_t>(k) + 1, BigInt(0));
      p.coeffs_.back() = std::move(c);
    }
    return p;
  }

  bool is_zero() const { return coeffs_.empty(); }

  // Degree of the zero polynomial is -1 by convention.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  const BigInt& coeff(int k) const {
    static const BigInt kZero(0);
    if (k < 0 || k >= static_cast<int>(coeffs_.size())) return kZero;
    return coeffs_[static_cast<std::size_t>(k)];
  }

  const std::vector<BigInt>& coefficients() const { return coeffs_; }

  friend NuPolynomial operator+(const NuPolynomial& a, const NuPolynomial& b) {
    std::vector<BigInt> c(std::max(a.coeffs_.size(), b.coeffs_.size()), BigInt(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
    return NuPolynomial(std::move(c));
  }

  friend NuPolynomial operator-(const NuPolynomial& a, const NuPolynomial& b) {
    std::vector<BigInt> c(std::max(a.coeffs_.size(), b.coeffs_.size()), BigInt(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] -= b.coeffs_[i];
    return NuPolynomial(std::move(c));
  }

  friend NuPolynomial operator*(const NuPolynomial& a, const NuPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return NuPolynomial();
    std::vector<BigInt> c(a.coeffs_.size() + b.coeffs_.size() - 1, BigInt(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
        c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return NuPolynomial(std::move(c));
  }

  NuPolynomial& operator+=(const NuPolynomial& o) { return *this = *this + o; }
  NuPolynomial& operator*=(const NuPolynomial& o) { return *this = *this * o; }

  NuPolynomial scaled(const BigInt& k) const {
    if (k == 0) return NuPolynomial();
    std::vector<BigInt> c(coeffs_);
    for (auto& x : c) x *= k;
    return NuPolynomial(std::move(c));
  }

  // Substitute nu -> k * nu.
  NuPolynomial with_nu_scaled(const BigInt& k) const {
    std::vector<BigInt> c(coeffs_);
    BigInt f = 1;
    for (std::size_t i = 1; i < c.size(); ++i) {
      f *= k;
      c[i] *= f;
    }
    return NuPolynomial(std::move(c));
  }

  bool operator==(const NuPolynomial& o) const = default;

  // Exact evaluation at an integer argument.
  BigInt eval_exact(const BigInt& nu) const {
    BigInt acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * nu + *it;
    return acc;
  }

  double eval(double nu) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
      acc = acc * nu + to_double(*it);
    return acc;
  }

  std::string str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
      const BigInt& c = coeff(k);
      if (c == 0) continue;
      if (!first) os << (c > 0 ? " + " : " - ");
      else if (c < 0) os << "-";
      BigInt a = abs(c);
      if (a != 1 || k == 0) os << a.str();
      if (k > 0) {
        if (a != 1) os << "*";
        os << "nu";
        if (k > 1) os << "^" << k;
      }
      first = false;
    }
    return os.str();
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }

  std::vector<BigInt> coeffs_;
};

}  // namespace wishmom
