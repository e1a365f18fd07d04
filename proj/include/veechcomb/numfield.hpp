#pragma once

#include "veechcomb/polynomial.hpp"
#include "veechcomb/rational.hpp"

#include <compare>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace veechcomb {

/// Thrown when two operands live in different number fields.
struct FieldMismatch : std::logic_error {
  using std::logic_error::logic_error;
};

/// Q(alpha) for a real root alpha of a monic squarefree integer polynomial,
/// singled out by an isolating interval (lo, hi).
///
/// The object is a cheap handle to immutable shared data, so copies can be
/// passed to threads freely.
class NumberField {
 public:
  /// Validates integrality, monicity, squarefreeness and that (lo, hi)
  /// contains exactly one root with neither endpoint a root.
  /// The rationals, as Q[x]/(x).
  NumberField();
  NumberField(QPoly minpoly, Rational lo, Rational hi);

  /// Q itself, presented as Q[x]/(x) with the root 0.
  static NumberField rationals();

  int degree() const;
  const QPoly& minpoly() const;
  const Rational& lo() const;
  const Rational& hi() const;
  double approx_generator() const;

  /// Same minimal polynomial and the intervals isolate the same root.
  bool same_as(const NumberField& other) const;

  struct Data;
  const Data& data() const { return *data_; }

 private:
  std::shared_ptr<const Data> data_;
};

/// Element of a NumberField in the power basis 1, alpha, ..., alpha^{d-1}.
class FieldElement {
 public:
  /// Zero of the rationals.
  FieldElement();
  explicit FieldElement(NumberField field);
  FieldElement(NumberField field, const Rational& value);
  FieldElement(NumberField field, std::vector<Rational> coords);
  static FieldElement generator(const NumberField& field);

  const NumberField& field() const { return field_; }
  const std::vector<Rational>& coords() const { return coords_; }

  bool is_zero() const;
  bool is_rational() const;
  /// Exact sign of the value under the distinguished real embedding.
  int sign() const;
  double approx() const;
  /// Closed rational interval containing the value, refined until its width
  /// is at most 2^-bits (or the value is rational).
  std::pair<Rational, Rational> enclosure(int bits) const;

  FieldElement operator-() const;
  FieldElement& operator+=(const FieldElement& o);
  FieldElement& operator-=(const FieldElement& o);
  FieldElement& operator*=(const FieldElement& o);
  FieldElement& operator/=(const FieldElement& o);
  FieldElement inverse() const;

  friend FieldElement operator+(FieldElement a, const FieldElement& b) { return a += b; }
  friend FieldElement operator-(FieldElement a, const FieldElement& b) { return a -= b; }
  friend FieldElement operator*(FieldElement a, const FieldElement& b) { return a *= b; }
  friend FieldElement operator/(FieldElement a, const FieldElement& b) { return a /= b; }
  friend FieldElement operator*(const Rational& s, FieldElement a);

  /// Exact equality of coordinates (fields must agree).
  friend bool operator==(const FieldElement& a, const FieldElement& b);
  friend std::strong_ordering operator<=>(const FieldElement& a, const FieldElement& b);

  std::string to_string() const;

 private:
  void require_same_field(const FieldElement& o) const;
  QPoly as_poly() const { return QPoly(coords_); }

  NumberField field_;
  std::vector<Rational> coords_;
};

/// -1, 0 or +1 according to a < b, a == b, a > b in the real embedding.
int compare(const FieldElement& a, const FieldElement& b);

FieldElement abs(const FieldElement& a);

/// Minimal polynomial of 2cos(pi/n) with an isolating interval for that root.
struct TwoCosMinpoly {
  QPoly minpoly;
  Rational lo, hi;
};

/// Throws std::invalid_argument for n < 2.
TwoCosMinpoly minpoly_2cos_pi_over(int n);

/// The field Q(2cos(pi/n)) with generator 2cos(pi/n).
NumberField field_2cos_pi_over(int n);

/// 2cos(k*pi/n) inside field_2cos_pi_over(n) (any integer k).
FieldElement two_cos_multiple(const NumberField& field_2cos_pi_n, int n, long k);

/// Default number of bisection rounds before the exact zero test; read from
/// VEECHCOMB_REFINE_CAP when set, otherwise 256.
int refinement_cap();

}  // namespace veechcomb
