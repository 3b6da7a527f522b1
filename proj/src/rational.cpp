#include "tg/rational.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <sstream>

namespace tg {

namespace {

constexpr int kMaxFractionDigits = 12;

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

std::optional<Rational> parse_rational(const std::string& text) {
  using boost::multiprecision::cpp_int;
  std::string s = text;
  if (s.empty()) return std::nullopt;
  bool negative = false;
  if (s[0] == '-') {
    negative = true;
    s = s.substr(1);
  }
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    cpp_int n(num), d(den);
    if (d == 0) return std::nullopt;
    Rational r(n, d);
    return negative ? -r : r;
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    if (!all_digits(s)) return std::nullopt;
    Rational r{cpp_int(s)};
    return negative ? -r : r;
  }
  std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
  if (whole.empty()) whole = "0";
  if (!all_digits(whole) || (!frac.empty() && !all_digits(frac)))
    return std::nullopt;
  if (frac.size() > kMaxFractionDigits) return std::nullopt;
  cpp_int den = 1;
  for (size_t i = 0; i < frac.size(); ++i) den *= 10;
  cpp_int num = cpp_int(whole) * den + (frac.empty() ? cpp_int(0) : cpp_int(frac));
  Rational r(num, den);
  return negative ? -r : r;
}

Rational rational_from_double(double x) {
  using boost::multiprecision::cpp_int;
  if (x == 0.0) return Rational(0);
  bool neg = x < 0;
  if (neg) x = -x;
  int e = 0;
  double m = std::frexp(x, &e);          // x = m * 2^e, m in [0.5, 1)
  auto mant = static_cast<long long>(std::ldexp(m, 53));  // exact for doubles
  Rational r{cpp_int(mant)};
  int shift = e - 53;
  if (shift > 0) {
    r *= Rational(cpp_int(1) << shift);
  } else if (shift < 0) {
    r /= Rational(cpp_int(1) << -shift);
  }
  return neg ? -r : r;
}

std::string rational_to_string(const Rational& r) {
  std::ostringstream os;
  if (denominator(r) == 1) {
    os << numerator(r);
  } else {
    os << numerator(r) << "/" << denominator(r);
  }
  return os.str();
}

}  // namespace tg
