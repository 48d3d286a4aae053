#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace sai {

/// Exact rational coefficient. GMP keeps values in lowest terms with a
/// positive denominator.
using Rational = mpq_class;

/// Parses "3", "-7", "0.5", "-1.25", "3/4" or "-3/4" exactly.
/// Throws std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// "3", "-1/2".
std::string to_string(const Rational& q);

/// SMT-LIB 2 real term: "3", "(/ 1 2)", "(- (/ 1 2))", "(- 3)".
std::string to_smtlib(const Rational& q);

int sign(const Rational& q);

}  // namespace sai
