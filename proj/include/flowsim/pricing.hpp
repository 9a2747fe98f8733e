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
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "flowsim/rational.hpp"

namespace flowsim {

struct ExecutionTrace;

struct PricingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/*
 * Two billing families are modelled. Function platforms charge per started
 * block (typically 100 ms) scaled by allocated memory, plus a per-request
 * fee. Container platforms charge per started second of vCPU and memory,
 * with an optional minimum billable duration (e.g. one minute).
 *
 * Rates are config inputs; the shipped defaults are placeholders, not
 * provider price sheets.
 */
struct BillingScheme {
  enum class Kind { faas_blocks, caas_seconds };

  Kind kind = Kind::faas_blocks;
  int block_ms = 100;              // faas: granularity of a started block
  Rational rate_per_gb_block;      // faas: currency per GB-block
  Rational rate_per_vcpu_s;        // caas: currency per vCPU-second
  Rational rate_per_gb_s;          // caas: currency per GB-second
  Rational min_billable_s;         // caas: minimum charged duration
  Rational per_request_fee;        // charged per submission, throttled ones included
};

struct AttemptCost {
  std::string task_id;
  int attempt_no = 0;
  std::string executor;
  Rational cost;
};

struct CostReport {
  std::vector<AttemptCost> per_attempt;
  std::map<std::string, Rational> per_task;
  std::map<std::string, Rational> per_executor;
  Rational grand_total;
  std::string currency_label;
  std::string notes;
};

/// Number of started blocks in a duration; 0 only for a duration of exactly 0.
std::int64_t billable_blocks(const Rational& duration_ms, int block_ms);

/// Block-priced function invocation: fee + blocks x (memory/1024 GB) x rate.
Rational bill_faas(const BillingScheme& scheme, const Rational& duration_ms, int memory_mb);

// Per-second container billing. Rounding to the next started second happens
// before the minimum-charge comparison, so 60.5 s bills as 61 s even with a
// 60 s floor.
Rational bill_caas(const BillingScheme& scheme, const Rational& duration_s, const Rational& vcpu,
                   const Rational& memory_gb);

/// Bills every admitted lifecycle in a trace. Container attempts pay for the
/// whole provisioned span (admission to release); function attempts pay for
/// the measured execution duration only. Throttled submissions cost only the
/// per-request fee.
CostReport cost_report(const ExecutionTrace& trace,
                       const std::map<std::string, BillingScheme>& schemes_by_executor);

/// JSON rendering with amounts as 6-decimal strings.
std::string serialize_cost_report(const CostReport& report);

BillingScheme billing_scheme_from_json(const nlohmann::json& j);
nlohmann::json billing_scheme_to_json(const BillingScheme& scheme);

}  // namespace flowsim
