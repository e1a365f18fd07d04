#include "veechcomb/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace veechcomb {

int sign_of(const Rational& q) { return sgn(q); }

QPoly::QPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

QPoly QPoly::monomial(const Rational& c, int degree) {
  std::vector<Rational> v(static_cast<std::size_t>(degree) + 1);
  v.back() = c;
  return QPoly(std::move(v));
}

void QPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational QPoly::eval(const Rational& x) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double QPoly::eval(double x) const {
  double acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + it->get_d();
  return acc;
}

QPoly QPoly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rational> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
  return QPoly(std::move(d));
}

QPoly QPoly::monic() const {
  if (is_zero()) return {};
  Rational inv = 1 / leading();
  return inv * *this;
}

QPoly operator+(const QPoly& a, const QPoly& b) {
  std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
  return QPoly(std::move(r));
}

QPoly QPoly::operator-() const {
  QPoly r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

QPoly operator-(const QPoly& a, const QPoly& b) { return a + (-b); }

QPoly operator*(const QPoly& a, const QPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> r(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  return QPoly(std::move(r));
}

QPoly operator*(const Rational& s, const QPoly& a) {
  std::vector<Rational> r = a.c_;
  for (auto& x : r) x *= s;
  return QPoly(std::move(r));
}

std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<Rational> rem = a.coeffs();
  int db = b.degree();
  if (a.degree() < db) return {QPoly{}, a};
  std::vector<Rational> quo(static_cast<std::size_t>(a.degree() - db) + 1);
  Rational lead_inv = 1 / b.leading();
  for (int k = a.degree() - db; k >= 0; --k) {
    Rational q = rem[k + db] * lead_inv;
    quo[k] = q;
    if (q == 0) continue;
    for (int j = 0; j <= db; ++j) rem[k + j] -= q * b.coeffs()[j];
  }
  rem.resize(static_cast<std::size_t>(db));
  return {QPoly(std::move(quo)), QPoly(std::move(rem))};
}

QPoly gcd(const QPoly& a, const QPoly& b) {
  QPoly x = a, y = b;
  while (!y.is_zero()) {
    QPoly r = divmod(x, y).second;
    x = std::move(y);
    y = r.monic();
  }
  return x.monic();
}

std::pair<QPoly, QPoly> inverse_mod(const QPoly& a, const QPoly& m) {
  // Invariant: s_i * a == r_i (mod m).
  QPoly r0 = m, r1 = divmod(a, m).second;
  QPoly s0, s1 = QPoly::constant(1);
  while (!r1.is_zero()) {
    auto [q, r] = divmod(r0, r1);
    QPoly s = s0 - q * s1;
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s);
  }
  if (r0.is_zero()) return {QPoly{}, QPoly{}};
  Rational inv = 1 / r0.leading();
  return {inv * r0, divmod(inv * s0, m).second};
}

namespace {

int sign_changes(const std::vector<QPoly>& seq, const Rational& x) {
  int changes = 0, prev = 0;
  for (const auto& p : seq) {
    int s = sign_of(p.eval(x));
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

}  // namespace

int sturm_count(const QPoly& p, const Rational& lo, const Rational& hi) {
  if (p.degree() < 1) return 0;
  std::vector<QPoly> seq{p, p.derivative()};
  while (!seq.back().is_zero() && seq.back().degree() > 0) {
    QPoly r = divmod(seq[seq.size() - 2], seq.back()).second;
    if (r.is_zero()) break;
    seq.push_back(-r);
  }
  return sign_changes(seq, lo) - sign_changes(seq, hi);
}

}  // namespace veechcomb
