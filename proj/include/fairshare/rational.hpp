#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fairshare {

/// Exact rational scalar used throughout the core path.
using Rational = mpq_class;

/// num/den in canonical form. Use this instead of the two-argument
/// mpq_class constructor, which does not reduce.
inline Rational frac(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}
inline Rational frac(const mpz_class& num, const mpz_class& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Parses an exact rational from text. Accepts integers ("7", "-3"),
/// fractions ("3/7") and decimals ("0.125", "-2.5", "1e-3", "2.5E2").
/// Throws std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when q == 1) form.
std::string to_string(const Rational& value);

/// The double nearest to `value`.
double to_double(const Rational& value);

/// Exact conversion of a finite double.
Rational from_double(double value);

/// floor / ceil for nonnegative or negative rationals.
mpz_class floor(const Rational& value);
mpz_class ceil(const Rational& value);

/// Exact test of `value <= a * sqrt(b) + c` for a, b >= 0, without
/// evaluating the square root. Used to compare certificate values
/// against irrational bounds.
bool leq_sqrt_bound(const Rational& value, const Rational& a, const Rational& b,
                    const Rational& c);

/// Binomial coefficient as an exact integer.
mpz_class binomial(unsigned long n, unsigned long k);

using RationalVector = std::vector<Rational>;

}  // namespace fairshare
