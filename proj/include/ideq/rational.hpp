#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace ideq {

// All probabilities and rewards in the model layer are exact rationals.
using Rational = mpq_class;

/// Parse "p", "-p" or "p/q" (decimal digits only). Throws std::invalid_argument
/// on any other form, including zero denominators and embedded whitespace.
Rational parse_rational(const std::string& text);

/// Canonical "p" or "p/q" form, matching the grammar accepted by parse_rational.
std::string rational_string(const Rational& q);

double to_double(const Rational& q);

/// Best rational approximation of x with denominator <= max_den, by continued
/// fractions. Values this close to a simple fraction snap to it exactly, which
/// is what lets iterative solvers hand exact candidates to the exact checker.
Rational rationalize(double x, std::uint64_t max_den = 1'000'000);

}  // namespace ideq
