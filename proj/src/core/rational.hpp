#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace entroflow {

// Exact arithmetic for probabilities, capacities, rates and LP data.
using Rational = mpq_class;
using Integer = mpz_class;

// Accepts "p/q", integers and decimal literals ("0.25", "-1.5e-2").
// Decimal literals are converted exactly. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

// Canonical form: "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

// alphabet <= 2^exponent, decided as alphabet^q <= 2^p for exponent = p/q.
bool alphabet_within(std::uint64_t alphabet, const Rational& exponent);

// alphabet >= 2^exponent, decided as alphabet^q >= 2^p.
bool alphabet_at_least(std::uint64_t alphabet, const Rational& exponent);

// Largest k with k <= 2^exponent (exponent >= 0).
std::uint64_t floor_pow2(const Rational& exponent);

// Smallest k with k >= 2^exponent (exponent >= 0).
std::uint64_t ceil_pow2(const Rational& exponent);

// log2(value) when value is an exact power of two.
std::optional<int> exact_log2(std::uint64_t value);

}  // namespace entroflow
