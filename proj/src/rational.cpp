// Copyright 2026 The flowsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "flowsim/rational.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace flowsim {

namespace {

BigInt pow10(unsigned exp) {
  BigInt r = 1;
  for (unsigned i = 0; i < exp; ++i) r *= 10;
  return r;
}

}  // namespace

Rational rational_from_decimal(std::string_view text) {
  const auto fail = [&] {
    throw std::invalid_argument("not a decimal number: '" + std::string(text) + "'");
  };

  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }

  BigInt mantissa = 0;
  long frac_digits = 0;
  bool any_digit = false;
  for (; pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])); ++pos) {
    mantissa = mantissa * 10 + (text[pos] - '0');
    any_digit = true;
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    for (; pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])); ++pos) {
      mantissa = mantissa * 10 + (text[pos] - '0');
      ++frac_digits;
      any_digit = true;
    }
  }
  if (!any_digit) fail();

  long exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool exp_neg = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      exp_neg = text[pos] == '-';
      ++pos;
    }
    if (pos == text.size()) fail();
    for (; pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])); ++pos) {
      exponent = exponent * 10 + (text[pos] - '0');
      if (exponent > 100000) fail();
    }
    if (exp_neg) exponent = -exponent;
  }
  if (pos != text.size()) fail();

  const long net = exponent - frac_digits;
  Rational result(mantissa);
  if (net > 0) {
    result *= Rational(pow10(static_cast<unsigned>(net)));
  } else if (net < 0) {
    result /= Rational(pow10(static_cast<unsigned>(-net)));
  }
  if (negative) result = -result;
  return result;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("cannot convert non-finite double to rational");
  }
  return Rational(value);
}

Rational rational_from_json(const nlohmann::json& value) {
  if (value.is_string()) return rational_from_decimal(value.get<std::string>());
  if (value.is_number_integer()) return Rational(BigInt(value.get<std::int64_t>()));
  if (value.is_number_unsigned()) return Rational(BigInt(value.get<std::uint64_t>()));
  if (value.is_number_float()) return rational_from_decimal(value.dump());
  throw std::invalid_argument("expected a number or numeric string, got: " + value.dump());
}

BigInt rational_ceil(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);  // always > 0
  BigInt q = num / den;
  if (num > 0 && q * den != num) ++q;
  return q;
}

std::string rational_to_decimal(const Rational& r, int places) {
  const bool negative = r < 0;
  const Rational abs_r = negative ? Rational(-r) : r;
  const BigInt scale = pow10(static_cast<unsigned>(places));
  const BigInt num = boost::multiprecision::numerator(abs_r) * scale;
  const BigInt den = boost::multiprecision::denominator(abs_r);
  BigInt scaled = num / den;
  // round half up on the first dropped digit
  if ((num % den) * 2 >= den) ++scaled;

  std::string digits = scaled.str();
  if (static_cast<int>(digits.size()) <= places) {
    digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
  }
  std::string out = digits.substr(0, digits.size() - places);
  if (places > 0) {
    out += '.';
    out += digits.substr(digits.size() - places);
  }
  if (negative && scaled != 0) out.insert(0, 1, '-');
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace flowsim
