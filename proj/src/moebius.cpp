#include "veechcomb/moebius.hpp"

namespace veechcomb {

std::string GaussianRational::to_string() const {
  if (sgn(im) == 0) return veechcomb::to_string(re);
  std::string s = sgn(re) == 0 ? "" : veechcomb::to_string(re);
  if (sgn(im) > 0 && !s.empty()) s += "+";
  if (im == 1) return s + "i";
  if (im == -1) return s + "-i";
  return s + veechcomb::to_string(im) + "i";
}

GaussianRational parse_gaussian(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) return GaussianRational(parse_rational(text));
  return GaussianRational(parse_rational(text.substr(0, comma)), parse_rational(text.substr(comma + 1)));
}

std::string to_string(MoebiusKind k) {
  switch (k) {
    case MoebiusKind::identity: return "identity";
    case MoebiusKind::elliptic: return "elliptic";
    case MoebiusKind::parabolic: return "parabolic";
    case MoebiusKind::hyperbolic_or_loxodromic: return "hyperbolic_or_loxodromic";
  }
  return "identity";
}

MoebiusKind classify(const RealMoebius& m) {
  FieldElement det = m.det();
  if (det.is_zero()) throw std::domain_error("non-invertible matrix");
  if (m.is_scalar()) return MoebiusKind::identity;
  FieldElement t2 = m.trace() * m.trace() / det;
  FieldElement four(det.field(), Rational(4));
  int c = compare(t2, four);
  if (c == 0) return MoebiusKind::parabolic;
  // Real matrices with negative determinant reverse orientation; tr^2/det < 0
  // then lands on the hyperbolic side.
  if (c < 0 && t2.sign() >= 0) return MoebiusKind::elliptic;
  return MoebiusKind::hyperbolic_or_loxodromic;
}

MoebiusKind classify(const GaussMoebius& m) {
  GaussianRational det = m.det();
  if (det.is_zero()) throw std::domain_error("non-invertible matrix");
  if (m.is_scalar()) return MoebiusKind::identity;
  GaussianRational t2 = m.trace() * m.trace() / det;
  if (!t2.is_real()) return MoebiusKind::hyperbolic_or_loxodromic;
  if (t2.re == 4) return MoebiusKind::parabolic;
  if (sgn(t2.re) >= 0 && t2.re < 4) return MoebiusKind::elliptic;
  return MoebiusKind::hyperbolic_or_loxodromic;
}

MoebiusKind classify(const FloatMoebius& m) {
  constexpr double tol = 1e-9;
  auto det = m.det();
  if (std::abs(det) < tol) throw std::domain_error("non-invertible matrix");
  double scale = std::sqrt(std::abs(det));
  if (std::abs(m.b) < tol * scale && std::abs(m.c) < tol * scale && std::abs(m.a - m.d) < tol * scale)
    return MoebiusKind::identity;
  auto t2 = m.trace() * m.trace() / det;
  if (std::abs(t2.imag()) > tol) return MoebiusKind::hyperbolic_or_loxodromic;
  if (std::abs(t2.real() - 4) <= tol) return MoebiusKind::parabolic;
  if (t2.real() >= -tol && t2.real() < 4) return MoebiusKind::elliptic;
  return MoebiusKind::hyperbolic_or_loxodromic;
}

bool Region::contains_imaginary_part(const Rational& y) const {
  Rational s = y - centre;
  switch (kind) {
    case RegionKind::strip: return abs(s) <= width;
    case RegionKind::horoball_pair: return s > width || s < -width;
    case RegionKind::halfplane: return s > width;
  }
  return false;
}

bool Region::contains(const GaussianRational& z) const { return contains_imaginary_part(z.im); }

std::string Region::describe() const {
  std::string c = veechcomb::to_string(centre), w = veechcomb::to_string(width);
  switch (kind) {
    case RegionKind::strip: return "|Im z - " + c + "| <= " + w;
    case RegionKind::horoball_pair: return "|Im z - " + c + "| > " + w;
    case RegionKind::halfplane: return "Im z - " + c + " > " + w;
  }
  return "";
}

Region standard_strip() { return {RegionKind::strip, 1, 0}; }
Region standard_horoballs() { return {RegionKind::horoball_pair, 1, 0}; }

long min_shear_power(const GaussianRational& mu) {
  if (sgn(mu.im) == 0) throw std::invalid_argument("shear not transverse");
  Rational q = Rational(2) / abs(mu.im);
  Integer fl = q.get_num() / q.get_den();  // floor, q > 0
  long K = fl.get_si() + 1;
  // Re-check with the region predicate: the shifted strip [K Im mu - 1, K Im mu + 1]
  // must avoid [-1, 1].
  Region h = standard_horoballs();
  Rational centre = K * mu.im;
  if (!h.contains_imaginary_part(centre - 1) || !h.contains_imaginary_part(centre + 1) ||
      (sgn(centre - 1) < 0 && sgn(centre + 1) > 0))
    throw std::logic_error("min_shear_power self-check failed");
  return K;
}

long min_shear_power(std::complex<double> mu) {
  if (std::abs(mu.imag()) < 1e-12) throw std::invalid_argument("shear not transverse");
  return static_cast<long>(std::floor(2.0 / std::abs(mu.imag()))) + 1;
}

}  // namespace veechcomb
