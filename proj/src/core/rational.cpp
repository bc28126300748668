#include "core/rational.hpp"

#include <cctype>
#include <limits>
#include <stdexcept>

namespace entroflow {

namespace {

bool is_integer_literal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

Integer parse_integer(std::string_view s) {
  if (!is_integer_literal(s))
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  std::string digits(s);
  if (digits[0] == '+') digits.erase(0, 1);
  return Integer(digits, 10);
}

Rational parse_decimal(std::string_view s) {
  std::string mantissa(s);
  long exponent = 0;
  if (auto e = mantissa.find_first_of("eE"); e != std::string::npos) {
    std::string exp_text = mantissa.substr(e + 1);
    if (!is_integer_literal(exp_text))
      throw std::invalid_argument("bad exponent in '" + std::string(s) + "'");
    exponent = std::stol(exp_text);
    mantissa.resize(e);
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa[0] == '+' || mantissa[0] == '-')) {
    negative = mantissa[0] == '-';
    mantissa.erase(0, 1);
  }
  auto dot = mantissa.find('.');
  std::string int_part = mantissa.substr(0, dot);
  std::string frac_part = dot == std::string::npos ? "" : mantissa.substr(dot + 1);
  if ((int_part + frac_part).empty())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  for (char c : int_part + frac_part)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  Integer numerator(int_part.empty() && !frac_part.empty() ? std::string("0") + frac_part
                                                            : int_part + frac_part,
                    10);
  exponent -= static_cast<long>(frac_part.size());
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational value = exponent < 0 ? Rational(numerator, scale) : Rational(numerator * scale);
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

Integer pow2(const Integer& exponent) {
  Integer out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, exponent.get_ui());
  return out;
}

Integer ipow(std::uint64_t base, const Integer& exponent) {
  Integer out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, exponent.get_ui());
  return out;
}

void require_small_nonneg(const Rational& exponent) {
  if (sgn(exponent) < 0) throw std::invalid_argument("negative exponent " + to_string(exponent));
  if (exponent > 64 * 1024) throw std::invalid_argument("exponent too large " + to_string(exponent));
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
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  if (is_integer_literal(text)) return Rational(parse_integer(text));
  return parse_decimal(text);
}

std::string to_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

double to_double(const Rational& value) { return value.get_d(); }

bool alphabet_within(std::uint64_t alphabet, const Rational& exponent) {
  require_small_nonneg(exponent);
  // alphabet^q <= 2^p
  return ipow(alphabet, exponent.get_den()) <= pow2(exponent.get_num());
}

bool alphabet_at_least(std::uint64_t alphabet, const Rational& exponent) {
  require_small_nonneg(exponent);
  return ipow(alphabet, exponent.get_den()) >= pow2(exponent.get_num());
}

std::uint64_t floor_pow2(const Rational& exponent) {
  require_small_nonneg(exponent);
  Integer bound = pow2(exponent.get_num());
  Integer root;
  mpz_root(root.get_mpz_t(), bound.get_mpz_t(), exponent.get_den().get_ui());
  if (!root.fits_ulong_p()) return std::numeric_limits<std::uint64_t>::max();
  return root.get_ui();
}

std::uint64_t ceil_pow2(const Rational& exponent) {
  std::uint64_t k = floor_pow2(exponent);
  if (alphabet_within(k, exponent) && ipow(k, exponent.get_den()) == pow2(exponent.get_num())) return k;
  return k + 1;
}

std::optional<int> exact_log2(std::uint64_t value) {
  if (value == 0 || (value & (value - 1)) != 0) return std::nullopt;
  int bits = 0;
  while (value > 1) {
    value >>= 1;
    ++bits;
  }
  return bits;
}

}  // namespace entroflow
