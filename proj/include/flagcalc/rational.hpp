#pragma once

#include <gmpxx.h>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace flagcalc {

using Rational = mpq_class;
using Integer = mpz_class;

// Parses "p" or "p/q" with optional sign. Decimal points are rejected on
// purpose: every exact interface of the library takes rationals only.
Rational parse_rational(const std::string& s);

std::string rational_to_string(const Rational& r);

double to_double(const Rational& r);

// Exact value of the IEEE double (always a dyadic rational).
Rational rational_from_double(double x);

// Best rational approximation to x among all p/q with 1 <= q <= max_denom,
// by walking the continued-fraction convergents and the final semiconvergent.
Rational best_rational_approx(const Rational& x, const Integer& max_denom);

// Largest multiple of 1/denom that is <= x.
Rational floor_to_denom(const Rational& x, const Integer& denom);

Integer binomial(unsigned n, unsigned k);
Integer falling_factorial(unsigned n, unsigned k);

// Shortest decimal string that round-trips through double.
std::string shortest_double_string(double x);

}  // namespace flagcalc
