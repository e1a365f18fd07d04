#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace veechcomb {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p/q", "-7", or a finite decimal such as "0.25" exactly.
/// Throws std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when q = 1).
std::string to_string(const Rational& q);

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

}  // namespace veechcomb
