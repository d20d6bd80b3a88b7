#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace ew {

using Rational = mpq_class;

/// gcd of two rationals: gcd of numerators over lcm of denominators.
/// gcd(0,0) = 0. The result is nonnegative.
Rational rational_gcd(const Rational& a, const Rational& b);

/// Exact square root, if the rational is a perfect square (>= 0).
std::optional<Rational> rational_sqrt(const Rational& q);

/// Parse "p", "p/q" or a decimal literal like "-0.125" into an exact rational.
std::optional<Rational> parse_rational(const std::string& text);

std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace ew
