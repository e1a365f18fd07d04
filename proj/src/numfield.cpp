#include "veechcomb/numfield.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace veechcomb {

struct NumberField::Data {
  QPoly minpoly;
  Rational lo, hi;
  // Sub-interval of (lo, hi) of width <= 2^-96 around the root.
  Rational tight_lo, tight_hi;
  double alpha = 0;
  int degree = 0;
  // reduction[k] = coordinates of alpha^(degree + k).
  std::vector<std::vector<Rational>> reduction;
};

int refinement_cap() {
  static const int cap = [] {
    if (const char* env = std::getenv("VEECHCOMB_REFINE_CAP")) {
      int v = std::atoi(env);
      if (v > 0) return v;
    }
    return 256;
  }();
  return cap;
}

namespace {

// One bisection step of the root interval; keeps the half with a sign change.
void bisect_root(const QPoly& m, Rational& lo, Rational& hi) {
  Rational mid = (lo + hi) / 2;
  int s_mid = sign_of(m.eval(mid));
  if (s_mid == 0) {
    // mid is the root itself: collapse to a tiny interval around it.
    Rational eps = (hi - lo) / 1024;
    lo = mid - eps;
    hi = mid + eps;
    return;
  }
  if (sign_of(m.eval(lo)) * s_mid < 0)
    hi = mid;
  else
    lo = mid;
}

Rational pow2_neg(int bits) {
  Integer d;
  mpz_ui_pow_ui(d.get_mpz_t(), 2, static_cast<unsigned long>(bits));
  return Rational(Integer(1), d);
}

// Interval Horner evaluation of p over [lo, hi].
std::pair<Rational, Rational> eval_interval(const std::vector<Rational>& p, const Rational& lo, const Rational& hi) {
  Rational alo = 0, ahi = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    Rational a = alo * lo, b = alo * hi, c = ahi * lo, d = ahi * hi;
    Rational mn = a, mx = a;
    for (const Rational* v : {&b, &c, &d}) {
      if (*v < mn) mn = *v;
      if (*v > mx) mx = *v;
    }
    alo = mn + *it;
    ahi = mx + *it;
  }
  return {alo, ahi};
}

// Floating-point sign filter with a conservative a-priori error bound.
// Returns 0 when undecided.
int fast_sign(const std::vector<Rational>& coords, double alpha) {
  double v = 0, bound = 0, dbound = 0, aa = std::fabs(alpha);
  int d = static_cast<int>(coords.size());
  for (int i = d - 1; i >= 0; --i) {
    double c = coords[i].get_d();
    v = v * alpha + c;
    dbound = dbound * (aa + 1) + bound;
    bound = bound * aa + std::fabs(c);
  }
  if (!std::isfinite(v) || !std::isfinite(bound) || !std::isfinite(dbound)) return 0;
  constexpr double u = std::numeric_limits<double>::epsilon();
  double err = 8.0 * (d + 2) * u * bound + 1e-25 * dbound + 1e-290;
  if (v > err) return 1;
  if (v < -err) return -1;
  return 0;
}

}  // namespace

NumberField::NumberField(QPoly minpoly, Rational lo, Rational hi) {
  if (minpoly.degree() < 1) throw std::invalid_argument("minimal polynomial must have degree >= 1");
  if (minpoly.leading() != 1) throw std::invalid_argument("minimal polynomial must be monic");
  for (const auto& c : minpoly.coeffs())
    if (!is_integer(c)) throw std::invalid_argument("minimal polynomial must have integer coefficients");
  if (!(lo < hi)) throw std::invalid_argument("isolating interval must satisfy lo < hi");
  if (gcd(minpoly, minpoly.derivative()).degree() > 0)
    throw std::invalid_argument("minimal polynomial must be squarefree");
  if (minpoly.eval(lo) == 0 || minpoly.eval(hi) == 0)
    throw std::invalid_argument("isolating interval endpoints must not be roots");
  if (sturm_count(minpoly, lo, hi) != 1)
    throw std::invalid_argument("isolating interval must contain exactly one root");

  auto data = std::make_shared<Data>();
  data->degree = minpoly.degree();
  data->lo = lo;
  data->hi = hi;
  data->tight_lo = lo;
  data->tight_hi = hi;
  Rational target = pow2_neg(96);
  while (data->tight_hi - data->tight_lo > target) bisect_root(minpoly, data->tight_lo, data->tight_hi);
  data->alpha = Rational((data->tight_lo + data->tight_hi) / 2).get_d();

  int d = data->degree;
  // alpha^d = -(c_0 + ... + c_{d-1} alpha^{d-1}); subsequent powers by shifting.
  std::vector<Rational> cur(d);
  for (int i = 0; i < d; ++i) cur[i] = -minpoly.coeffs()[i];
  for (int k = 0; k <= d - 2; ++k) {
    data->reduction.push_back(cur);
    std::vector<Rational> next(d);
    for (int i = d - 1; i >= 1; --i) next[i] = cur[i - 1];
    for (int i = 0; i < d; ++i) next[i] += cur[d - 1] * -minpoly.coeffs()[i];
    cur = std::move(next);
  }
  data->minpoly = std::move(minpoly);
  data_ = std::move(data);
}

NumberField NumberField::rationals() {
  static const NumberField q(QPoly::x(), Rational(-1), Rational(1));
  return q;
}

NumberField::NumberField() : NumberField(rationals()) {}

FieldElement::FieldElement() : FieldElement(NumberField::rationals()) {}

int NumberField::degree() const { return data_->degree; }
const QPoly& NumberField::minpoly() const { return data_->minpoly; }
const Rational& NumberField::lo() const { return data_->lo; }
const Rational& NumberField::hi() const { return data_->hi; }
double NumberField::approx_generator() const { return data_->alpha; }

bool NumberField::same_as(const NumberField& other) const {
  if (data_ == other.data_) return true;
  if (!(data_->minpoly == other.data_->minpoly)) return false;
  const Data& a = *data_;
  const Data& b = *other.data_;
  // Each tight interval holds exactly one root; they are the same root iff
  // the tight intervals overlap.
  return !(a.tight_hi < b.tight_lo || b.tight_hi < a.tight_lo);
}

// ---------------------------------------------------------------------------

FieldElement::FieldElement(NumberField field) : field_(std::move(field)), coords_(field_.degree()) {}

FieldElement::FieldElement(NumberField field, const Rational& value)
    : field_(std::move(field)), coords_(field_.degree()) {
  coords_[0] = value;
}

FieldElement::FieldElement(NumberField field, std::vector<Rational> coords)
    : field_(std::move(field)), coords_(std::move(coords)) {
  int d = field_.degree();
  if (static_cast<int>(coords_.size()) > d) {
    // Reduce modulo the minimal polynomial.
    QPoly r = divmod(QPoly(coords_), field_.minpoly()).second;
    coords_.assign(d, Rational(0));
    for (int i = 0; i <= r.degree(); ++i) coords_[i] = r.coeffs()[i];
  }
  coords_.resize(d);
}

FieldElement FieldElement::generator(const NumberField& field) {
  if (field.degree() == 1) return FieldElement(field, -field.minpoly().coeffs()[0]);
  std::vector<Rational> c(field.degree());
  c[1] = 1;
  return FieldElement(field, std::move(c));
}

bool FieldElement::is_zero() const {
  for (const auto& c : coords_)
    if (c != 0) return false;
  return true;
}

bool FieldElement::is_rational() const {
  for (std::size_t i = 1; i < coords_.size(); ++i)
    if (coords_[i] != 0) return false;
  return true;
}

void FieldElement::require_same_field(const FieldElement& o) const {
  if (!field_.same_as(o.field_)) throw FieldMismatch("operands belong to different number fields");
}

int FieldElement::sign() const {
  if (is_zero()) return 0;
  if (is_rational()) return sign_of(coords_[0]);
  const auto& data = field_.data();
  if (int s = fast_sign(coords_, data.alpha)) return s;

  Rational lo = data.tight_lo, hi = data.tight_hi;
  int cap = refinement_cap();
  bool zero_tested = false;
  for (int round = 0;; ++round) {
    auto [vlo, vhi] = eval_interval(coords_, lo, hi);
    if (vlo > 0) return 1;
    if (vhi < 0) return -1;
    if (round >= cap && !zero_tested) {
      // The coordinates are nonzero but the value might still vanish when
      // the minimal polynomial is reducible.
      zero_tested = true;
      QPoly g = gcd(as_poly(), data.minpoly);
      if (g.degree() >= 1 && sign_of(g.eval(lo)) * sign_of(g.eval(hi)) < 0) return 0;
    }
    bisect_root(data.minpoly, lo, hi);
  }
}

double FieldElement::approx() const {
  if (is_rational()) return coords_[0].get_d();
  auto [lo, hi] = enclosure(60);
  return Rational((lo + hi) / 2).get_d();
}

std::pair<Rational, Rational> FieldElement::enclosure(int bits) const {
  if (is_rational()) return {coords_[0], coords_[0]};
  const auto& data = field_.data();
  Rational lo = data.tight_lo, hi = data.tight_hi;
  Rational target = pow2_neg(bits);
  for (int round = 0; round < 4096; ++round) {
    auto iv = eval_interval(coords_, lo, hi);
    if (iv.second - iv.first <= target) return iv;
    bisect_root(data.minpoly, lo, hi);
  }
  return eval_interval(coords_, lo, hi);
}

FieldElement FieldElement::operator-() const {
  FieldElement r = *this;
  for (auto& c : r.coords_) c = -c;
  return r;
}

FieldElement& FieldElement::operator+=(const FieldElement& o) {
  require_same_field(o);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += o.coords_[i];
  return *this;
}

FieldElement& FieldElement::operator-=(const FieldElement& o) {
  require_same_field(o);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= o.coords_[i];
  return *this;
}

FieldElement& FieldElement::operator*=(const FieldElement& o) {
  require_same_field(o);
  const int d = field_.degree();
  if (o.is_rational()) {
    for (auto& c : coords_) c *= o.coords_[0];
    return *this;
  }
  if (is_rational()) {
    Rational s = coords_[0];
    coords_ = o.coords_;
    for (auto& c : coords_) c *= s;
    return *this;
  }
  std::vector<Rational> prod(2 * d - 1);
  for (int i = 0; i < d; ++i) {
    if (coords_[i] == 0) continue;
    for (int j = 0; j < d; ++j)
      if (o.coords_[j] != 0) prod[i + j] += coords_[i] * o.coords_[j];
  }
  const auto& red = field_.data().reduction;
  for (int k = d; k <= 2 * d - 2; ++k) {
    if (prod[k] == 0) continue;
    const auto& row = red[k - d];
    for (int i = 0; i < d; ++i) prod[i] += prod[k] * row[i];
  }
  prod.resize(d);
  coords_ = std::move(prod);
  return *this;
}

FieldElement FieldElement::inverse() const {
  if (is_zero()) throw std::domain_error("division by zero in number field");
  if (is_rational()) return FieldElement(field_, Rational(1 / coords_[0]));
  auto [g, u] = inverse_mod(as_poly(), field_.minpoly());
  if (g.degree() != 0) {
    if (sign() == 0) throw std::domain_error("division by zero in number field");
    throw std::domain_error("element is not invertible modulo a reducible minimal polynomial");
  }
  std::vector<Rational> c(field_.degree());
  for (int i = 0; i <= u.degree(); ++i) c[i] = u.coeffs()[i];
  return FieldElement(field_, std::move(c));
}

FieldElement& FieldElement::operator/=(const FieldElement& o) {
  require_same_field(o);
  if (o.is_rational()) {
    if (o.coords_[0] == 0) throw std::domain_error("division by zero in number field");
    for (auto& c : coords_) c /= o.coords_[0];
    return *this;
  }
  return *this *= o.inverse();
}

FieldElement operator*(const Rational& s, FieldElement a) {
  for (auto& c : a.coords_) c *= s;
  return a;
}

bool operator==(const FieldElement& a, const FieldElement& b) {
  a.require_same_field(b);
  return a.coords_ == b.coords_;
}

int compare(const FieldElement& a, const FieldElement& b) { return (a - b).sign(); }

std::strong_ordering operator<=>(const FieldElement& a, const FieldElement& b) {
  int c = compare(a, b);
  return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

FieldElement abs(const FieldElement& a) { return a.sign() < 0 ? -a : a; }

std::string FieldElement::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (coords_[i] == 0) continue;
    if (!out.empty()) out += " + ";
    out += veechcomb::to_string(coords_[i]);
    if (i == 1) out += "*a";
    if (i > 1) out += "*a^" + std::to_string(i);
  }
  return out.empty() ? "0" : out;
}

// ---------------------------------------------------------------------------

namespace {

// Cyclotomic polynomial Phi_m by exact division of x^m - 1.
QPoly cyclotomic(int m) {
  QPoly num = QPoly::monomial(1, m) - QPoly::constant(1);
  for (int d = 1; d < m; ++d)
    if (m % d == 0) num = divmod(num, cyclotomic(d)).first;
  return num;
}

}  // namespace

TwoCosMinpoly minpoly_2cos_pi_over(int n) {
  if (n < 2) throw std::invalid_argument("minpoly_2cos_pi_over requires n >= 2");
  // 2cos(pi/n) = z + 1/z for z a primitive 2n-th root of unity. Phi_{2n} is
  // palindromic of degree 2e; Phi_{2n}(z)/z^e expands in V_k(x) = z^k + z^-k.
  QPoly phi = cyclotomic(2 * n);
  int e = phi.degree() / 2;
  std::vector<QPoly> v{QPoly::constant(2), QPoly::x()};
  for (int k = 2; k <= e; ++k) v.push_back(QPoly::x() * v[k - 1] - v[k - 2]);
  QPoly psi = QPoly::constant(phi.coeff(e));
  for (int k = 1; k <= e; ++k) psi = psi + phi.coeff(e + k) * v[k];

  double root = 2 * std::cos(std::numbers::pi / n);
  double delta = 1e-3;
  for (;;) {
    Rational lo(root - delta), hi(root + delta);
    if (psi.eval(lo) != 0 && psi.eval(hi) != 0 && sturm_count(psi, lo, hi) == 1) return {psi, lo, hi};
    delta /= 16;
  }
}

NumberField field_2cos_pi_over(int n) {
  auto mp = minpoly_2cos_pi_over(n);
  return NumberField(mp.minpoly, mp.lo, mp.hi);
}

FieldElement two_cos_multiple(const NumberField& field, int n, long k) {
  long period = 2L * n;
  k %= period;
  if (k < 0) k += period;
  FieldElement alpha = FieldElement::generator(field);
  FieldElement prev(field, Rational(2)), cur = alpha;
  if (k == 0) return prev;
  for (long i = 1; i < k; ++i) {
    FieldElement next = alpha * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace veechcomb
