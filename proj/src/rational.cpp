#include "advlab/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace advlab {

namespace {

Integer parse_integer(std::string_view text, std::string_view whole) {
  if (text.empty()) {
    throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
  }
  std::size_t i = 0;
  if (text[0] == '-' || text[0] == '+') i = 1;
  if (i == text.size()) {
    throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
  }
  for (std::size_t j = i; j < text.size(); ++j) {
    if (text[j] < '0' || text[j] > '9') {
      throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
    }
  }
  std::string digits(text.substr(text[0] == '+' ? 1 : 0));
  return Integer(digits);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer p = parse_integer(text.substr(0, slash), text);
    Integer q = parse_integer(text.substr(slash + 1), text);
    if (q == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(p, q);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    bool negative = !int_part.empty() && int_part[0] == '-';
    if (int_part.empty() || int_part == "-" || int_part == "+") {
      int_part = negative ? std::string_view("-0") : std::string_view("0");
    }
    if (frac_part.empty()) throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
    Integer whole = parse_integer(int_part, text);
    Integer frac = parse_integer(frac_part, text);
    if (frac_part[0] == '-' || frac_part[0] == '+') {
      throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
    }
    Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(frac_part.size()));
    Rational magnitude = Rational(abs(whole)) + Rational(frac, scale);
    return negative ? Rational(-magnitude) : magnitude;
  }
  return Rational(parse_integer(text, text));
}

std::string to_string(const Rational& x) {
  return boost::multiprecision::numerator(x).str() + "/" + boost::multiprecision::denominator(x).str();
}

Integer floor(const Rational& x) {
  Integer p = boost::multiprecision::numerator(x);
  Integer q = boost::multiprecision::denominator(x);
  Integer quotient = p / q;  // truncates toward zero
  if (p < 0 && quotient * q != p) quotient -= 1;
  return quotient;
}

Integer ceil(const Rational& x) { return -floor(Rational(-x)); }

double to_double(const Rational& x) { return x.convert_to<double>(); }

Rational from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot convert non-finite double to rational");
  int exponent = 0;
  double mantissa = std::frexp(x, &exponent);
  // 53 significant bits fit exactly into an int64.
  auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  return Rational(Integer(scaled)) * pow2(exponent - 53);
}

Rational pow2(int e) {
  Integer p = Integer(1) << static_cast<unsigned>(e < 0 ? -e : e);
  return e < 0 ? Rational(Integer(1), p) : Rational(p);
}

Rational dyadic_round(const Rational& x, int n) {
  Rational scale = pow2(n);
  Integer k = floor(Rational(x * scale + Rational(1, 2)));
  return Rational(k) / scale;
}

}  // namespace advlab
