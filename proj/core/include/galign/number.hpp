#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace galign {

// All model quantities and evaluation sums are exact rationals; decimal input
// such as "0.75" or "29.75" is represented without rounding.
using Number = boost::multiprecision::cpp_rational;

// Parses `digits[.digits]` with an optional exponent (`1e-3`); the exponent is
// accepted so that shortest-form doubles from JSON can be read back exactly.
std::optional<Number> parse_decimal(std::string_view text);

// Exact decimal text for terminating rationals ("80", "0.75", "1.125").
// Non-terminating values are rounded to `max_fraction_digits` and trimmed.
std::string format_decimal(const Number& value, int max_fraction_digits = 12);

// Fixed-point text with exactly `digits` fraction digits, rounded half away from zero.
std::string format_fixed(const Number& value, int digits);

double to_double(const Number& value);

// Converts through the shortest round-trip decimal form, so 0.1 becomes 1/10.
Number from_double(double value);

bool is_terminating_decimal(const Number& value);

}  // namespace galign
