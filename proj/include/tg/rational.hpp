#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace tg {

using Rational = boost::multiprecision::cpp_rational;

/// Parses a probability literal: either "p/q" or a decimal with at most
/// 12 fractional digits. Returns nullopt on malformed input or q = 0.
std::optional<Rational> parse_rational(const std::string& text);

/// Canonical rendering: "p/q" with q > 0, or "p" when the denominator is 1.
std::string rational_to_string(const Rational& r);

inline double to_double(const Rational& r) { return static_cast<double>(r); }

/// Exact conversion of a finite double (dyadic rational).
Rational rational_from_double(double x);

}  // namespace tg
