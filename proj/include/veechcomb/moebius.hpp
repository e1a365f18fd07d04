#pragma once

#include "veechcomb/numfield.hpp"
#include "veechcomb/rational.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace veechcomb {

/// Exact complex number with rational parts.
struct GaussianRational {
  Rational re, im;

  GaussianRational() = default;
  GaussianRational(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}

  GaussianRational conj() const { return {re, -im}; }
  Rational norm() const { return re * re + im * im; }
  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    Rational n = b.norm();
    if (sgn(n) == 0) throw std::domain_error("division by zero");
    GaussianRational p = a * b.conj();
    return {Rational(p.re / n), Rational(p.im / n)};
  }
  GaussianRational operator-() const { return {-re, -im}; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  std::string to_string() const;
};

/// Parses "re,im" or "re" with rational or exact-decimal parts.
GaussianRational parse_gaussian(const std::string& text);

// Scalar helpers so that one matrix template serves every backend.
inline FieldElement scalar_from_int(const FieldElement& like, long n) { return FieldElement(like.field(), Rational(n)); }
inline GaussianRational scalar_from_int(const GaussianRational&, long n) { return GaussianRational(Rational(n)); }
inline std::complex<double> scalar_from_int(const std::complex<double>&, long n) { return {double(n), 0.0}; }
inline bool scalar_is_zero(const FieldElement& x) { return x.is_zero(); }
inline bool scalar_is_zero(const GaussianRational& x) { return x.is_zero(); }
inline bool scalar_is_zero(const std::complex<double>& x) { return std::abs(x) < 1e-12; }

/// 2x2 matrix acting by Moebius transformations; identified with its negative.
template <class S>
struct Moebius {
  S a, b, c, d;

  static Moebius identity(const S& like) {
    return {scalar_from_int(like, 1), scalar_from_int(like, 0), scalar_from_int(like, 0), scalar_from_int(like, 1)};
  }
  S det() const { return a * d - b * c; }
  S trace() const { return a + d; }
  /// Adjugate; the inverse up to the determinant, so projectively exact.
  Moebius inverse() const { return {d, scalar_from_int(a, 0) - b, scalar_from_int(a, 0) - c, a}; }
  Moebius operator-() const {
    S z = scalar_from_int(a, 0);
    return {z - a, z - b, z - c, z - d};
  }
  friend Moebius operator*(const Moebius& x, const Moebius& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  bool operator==(const Moebius& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }

  Moebius power(long m) const {
    Moebius base = m < 0 ? inverse() : *this;
    Moebius r = identity(a);
    for (unsigned long e = m < 0 ? -static_cast<unsigned long>(m) : m; e; e >>= 1) {
      if (e & 1) r = r * base;
      base = base * base;
    }
    return r;
  }
  bool is_scalar() const { return scalar_is_zero(b) && scalar_is_zero(c) && scalar_is_zero(a - d); }
  /// Equality in PGL(2): one matrix is a scalar multiple of the other.
  bool projectively_equal(const Moebius& o) const {
    return scalar_is_zero(a * o.b - b * o.a) && scalar_is_zero(a * o.c - c * o.a) &&
           scalar_is_zero(a * o.d - d * o.a) && scalar_is_zero(b * o.c - c * o.b) &&
           scalar_is_zero(b * o.d - d * o.b) && scalar_is_zero(c * o.d - d * o.c);
  }
};

using RealMoebius = Moebius<FieldElement>;
using GaussMoebius = Moebius<GaussianRational>;
using FloatMoebius = Moebius<std::complex<double>>;

enum class MoebiusKind { identity, elliptic, parabolic, hyperbolic_or_loxodromic };
std::string to_string(MoebiusKind k);

/// Classification through the conjugation invariant tr^2 / det. Throws
/// std::domain_error on a singular matrix.
MoebiusKind classify(const RealMoebius& m);
MoebiusKind classify(const GaussMoebius& m);
/// Float backend with tolerance 1e-9.
MoebiusKind classify(const FloatMoebius& m);

/// Smallest m in [1, max_order] with m = scalar, or 0.
template <class S>
long projective_order(const Moebius<S>& m, long max_order) {
  Moebius<S> p = m;
  for (long k = 1; k <= max_order; ++k) {
    if (p.is_scalar()) return k;
    p = p * m;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Regions of the Riemann sphere bounded by horizontal lines.

enum class RegionKind { strip, horoball_pair, halfplane };

/// strip: |Im z - c| <= w; horoball_pair: Im z - c > w or Im z - c < -w;
/// halfplane: Im z - c > w. Infinity belongs to none of them.
struct Region {
  RegionKind kind = RegionKind::strip;
  Rational width = 1;
  Rational centre = 0;  // imaginary offset c

  bool contains(const GaussianRational& z) const;
  bool contains_imaginary_part(const Rational& y) const;
  std::string describe() const;
};

Region standard_strip();     // Theta
Region standard_horoballs();  // H

/// Smallest K >= 1 with h^K(Theta) inside H for h = [[1, mu], [0, 1]].
/// Throws std::invalid_argument("shear not transverse") for real mu.
long min_shear_power(const GaussianRational& mu);
long min_shear_power(std::complex<double> mu);

}  // namespace veechcomb
