#include "galign/number.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace galign {

namespace {

using boost::multiprecision::cpp_int;

cpp_int pow10(int exponent) {
  cpp_int result = 1;
  for (int i = 0; i < exponent; ++i) result *= 10;
  return result;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::optional<Number> parse_decimal(std::string_view text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
    negative = text[pos] == '-';
    ++pos;
  }
  cpp_int mantissa = 0;
  int scale = 0;
  std::size_t int_digits = 0;
  while (pos < text.size() && is_digit(text[pos])) {
    mantissa = mantissa * 10 + (text[pos] - '0');
    ++pos;
    ++int_digits;
  }
  std::size_t frac_digits = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && is_digit(text[pos])) {
      mantissa = mantissa * 10 + (text[pos] - '0');
      ++pos;
      ++frac_digits;
      ++scale;
    }
    if (frac_digits == 0) return std::nullopt;
  }
  if (int_digits == 0 && frac_digits == 0) return std::nullopt;
  int exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool exp_negative = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
      exp_negative = text[pos] == '-';
      ++pos;
    }
    std::size_t exp_digits = 0;
    while (pos < text.size() && is_digit(text[pos])) {
      exponent = exponent * 10 + (text[pos] - '0');
      if (exponent > 4000) return std::nullopt;
      ++pos;
      ++exp_digits;
    }
    if (exp_digits == 0) return std::nullopt;
    if (exp_negative) exponent = -exponent;
  }
  if (pos != text.size()) return std::nullopt;

  int net = exponent - scale;
  Number result = net >= 0 ? Number(mantissa * pow10(net))
                           : Number(mantissa, pow10(-net));
  return negative ? Number(-result) : result;
}

bool is_terminating_decimal(const Number& value) {
  cpp_int den = boost::multiprecision::denominator(value);
  while (den % 2 == 0) den /= 2;
  while (den % 5 == 0) den /= 5;
  return den == 1;
}

std::string format_fixed(const Number& value, int digits) {
  bool negative = value < 0;
  Number magnitude = negative ? Number(-value) : value;
  cpp_int scale = pow10(digits);
  Number scaled = magnitude * scale;
  cpp_int num = boost::multiprecision::numerator(scaled);
  cpp_int den = boost::multiprecision::denominator(scaled);
  cpp_int q = num / den;
  cpp_int r = num % den;
  if (r * 2 >= den) q += 1;
  std::string int_part = cpp_int(q / scale).str();
  std::string frac_part = cpp_int(q % scale).str();
  if (digits > 0) frac_part.insert(0, digits - frac_part.size(), '0');
  std::string out;
  if (negative && q != 0) out += '-';
  out += int_part;
  if (digits > 0) {
    out += '.';
    out += frac_part;
  }
  return out;
}

std::string format_decimal(const Number& value, int max_fraction_digits) {
  int digits = max_fraction_digits;
  if (is_terminating_decimal(value)) {
    // A terminating denominator 2^a 5^b needs max(a, b) fraction digits.
    cpp_int den = boost::multiprecision::denominator(value);
    digits = 0;
    while (den != 1) {
      den = (den % 10 == 0) ? den / 10 : (den % 5 == 0 ? den / 5 : den / 2);
      ++digits;
    }
  }
  std::string text = format_fixed(value, digits);
  if (text.find('.') != std::string::npos) {
    while (text.back() == '0') text.pop_back();
    if (text.back() == '.') text.pop_back();
  }
  if (text == "-0") text = "0";
  return text;
}

double to_double(const Number& value) { return value.convert_to<double>(); }

Number from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite number");
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) throw std::invalid_argument("unrepresentable number");
  auto parsed = parse_decimal(std::string_view(buffer, end - buffer));
  if (!parsed) throw std::invalid_argument("unrepresentable number");
  return *parsed;
}

}  // namespace galign
