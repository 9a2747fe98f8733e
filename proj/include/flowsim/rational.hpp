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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include <nlohmann/json_fwd.hpp>

namespace flowsim {

// Exact arithmetic for billing. Simulation times stay double; money never does.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses a decimal literal ("12", "-0.25", "1.7e-6") into an exact rational.
/// Throws std::invalid_argument on anything else.
Rational rational_from_decimal(std::string_view text);

/// Exact conversion of a finite double (every finite double is a rational).
Rational rational_from_double(double value);

/// Reads a JSON number or numeric string. Floats go through their shortest
/// decimal representation, so a config value written as 0.002 parses as 2/1000.
Rational rational_from_json(const nlohmann::json& value);

/// Smallest integer >= r.
BigInt rational_ceil(const Rational& r);

/// Fixed-point decimal rendering with round-half-up, e.g. (1/3, 6) -> "0.333333".
std::string rational_to_decimal(const Rational& r, int places);

/// Shortest round-trip decimal form of a double; deterministic across runs.
std::string format_double(double value);

}  // namespace flowsim
