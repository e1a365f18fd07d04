#include "veechcomb/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace veechcomb {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Integer parse_integer(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw std::invalid_argument("malformed integer '" + std::string(s) + "'");
  Integer z(std::string(s), 10);
  return neg ? Integer(-z) : z;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(text.substr(0, slash));
    Integer den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view ip = text.substr(0, dot);
    std::string_view fp = text.substr(dot + 1);
    bool neg = !ip.empty() && ip.front() == '-';
    if (!ip.empty() && (ip.front() == '-' || ip.front() == '+')) ip.remove_prefix(1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
      throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
    Integer whole = ip.empty() ? Integer(0) : Integer(std::string(ip), 10);
    Integer frac = fp.empty() ? Integer(0) : Integer(std::string(fp), 10);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
    Rational q(whole * scale + frac, scale);
    q.canonicalize();
    return neg ? Rational(-q) : q;
  }

  return Rational(parse_integer(text));
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace veechcomb
