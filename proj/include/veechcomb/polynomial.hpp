#pragma once

#include "veechcomb/rational.hpp"

#include <utility>
#include <vector>

namespace veechcomb {

/// Dense univariate polynomial over Q, coefficient i multiplies x^i.
/// Always trimmed: the zero polynomial has no coefficients.
class QPoly {
 public:
  QPoly() = default;
  explicit QPoly(std::vector<Rational> coeffs);
  static QPoly monomial(const Rational& c, int degree);
  static QPoly constant(const Rational& c) { return monomial(c, 0); }
  static QPoly x() { return monomial(1, 1); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : Rational(0); }
  const Rational& leading() const { return c_.back(); }

  Rational eval(const Rational& x) const;
  double eval(double x) const;
  QPoly derivative() const;
  QPoly monic() const;

  friend QPoly operator+(const QPoly& a, const QPoly& b);
  friend QPoly operator-(const QPoly& a, const QPoly& b);
  friend QPoly operator*(const QPoly& a, const QPoly& b);
  friend QPoly operator*(const Rational& s, const QPoly& a);
  QPoly operator-() const;
  friend bool operator==(const QPoly& a, const QPoly& b) { return a.c_ == b.c_; }

 private:
  void trim();
  std::vector<Rational> c_;
};

/// Quotient and remainder; throws std::domain_error when b is zero.
std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b);

/// Monic gcd (zero only if both inputs are zero).
QPoly gcd(const QPoly& a, const QPoly& b);

/// Returns (g, u) with u*a == g (mod m) and g = gcd(a, m) monic.
std::pair<QPoly, QPoly> inverse_mod(const QPoly& a, const QPoly& m);

/// Number of distinct real roots of a squarefree p in the half-open interval (lo, hi].
int sturm_count(const QPoly& p, const Rational& lo, const Rational& hi);

int sign_of(const Rational& q);

}  // namespace veechcomb
