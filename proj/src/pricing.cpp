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

#include "flowsim/pricing.hpp"

#include <nlohmann/json.hpp>

#include "flowsim/engine.hpp"

namespace flowsim {

std::int64_t billable_blocks(const Rational& duration_ms, int block_ms) {
  if (duration_ms < 0) throw PricingError("negative duration");
  if (block_ms < 1) throw PricingError("block_ms must be >= 1");
  if (duration_ms == 0) return 0;
  const BigInt blocks = rational_ceil(duration_ms / block_ms);
  return static_cast<std::int64_t>(blocks);
}

Rational bill_faas(const BillingScheme& scheme, const Rational& duration_ms, int memory_mb) {
  if (scheme.kind != BillingScheme::Kind::faas_blocks) {
    throw PricingError("bill_faas called with a non-faas scheme");
  }
  const Rational memory_gb = Rational(memory_mb) / 1024;
  return scheme.per_request_fee +
         Rational(billable_blocks(duration_ms, scheme.block_ms)) * memory_gb *
             scheme.rate_per_gb_block;
}

Rational bill_caas(const BillingScheme& scheme, const Rational& duration_s, const Rational& vcpu,
                   const Rational& memory_gb) {
  if (scheme.kind != BillingScheme::Kind::caas_seconds) {
    throw PricingError("bill_caas called with a non-caas scheme");
  }
  if (duration_s < 0) throw PricingError("negative duration");
  const Rational started_s(rational_ceil(duration_s));
  const Rational billed_s = started_s < scheme.min_billable_s ? scheme.min_billable_s : started_s;
  return billed_s * (vcpu * scheme.rate_per_vcpu_s + memory_gb * scheme.rate_per_gb_s);
}

CostReport cost_report(const ExecutionTrace& trace,
                       const std::map<std::string, BillingScheme>& schemes_by_executor) {
  CostReport report;
  report.currency_label = "USD (placeholder rates)";
  report.notes = "storage operation costs excluded";

  for (const auto& a : trace.attempts) {
    const auto it = schemes_by_executor.find(a.executor);
    if (it == schemes_by_executor.end()) {
      throw PricingError("no billing scheme for executor: " + a.executor);
    }
    const BillingScheme& scheme = it->second;

    Rational cost;
    if (scheme.kind == BillingScheme::Kind::faas_blocks) {
      // function billing covers the measured execution duration only
      const Rational duration_ms = rational_from_double(a.exec_s) * 1000;
      cost = bill_faas(scheme, duration_ms, a.allocation.memory_mb);
    } else {
      // the container is provisioned, and billed, from admission to release
      const Rational lifetime_s = rational_from_double(a.end_t - a.setup_start_t);
      cost = bill_caas(scheme, lifetime_s, rational_from_double(a.allocation.vcpu),
                       Rational(a.allocation.memory_mb) / 1024);
    }
    // each throttled submission was still a request
    cost += scheme.per_request_fee * a.throttle_events;

    report.per_attempt.push_back({a.task_id, a.attempt_no, a.executor, cost});
    report.per_task[a.task_id] += cost;
    report.per_executor[a.executor] += cost;
    report.grand_total += cost;
  }
  return report;
}

std::string serialize_cost_report(const CostReport& report) {
  nlohmann::ordered_json j;
  j["currency_label"] = report.currency_label;
  j["notes"] = report.notes;
  j["grand_total"] = rational_to_decimal(report.grand_total, 6);
  j["per_executor"] = nlohmann::ordered_json::object();
  for (const auto& [name, total] : report.per_executor) {
    j["per_executor"][name] = rational_to_decimal(total, 6);
  }
  std::map<std::string, nlohmann::ordered_json> attempts_by_task;
  for (const auto& a : report.per_attempt) {
    nlohmann::ordered_json aj;
    aj["attempt_no"] = a.attempt_no;
    aj["executor"] = a.executor;
    aj["cost"] = rational_to_decimal(a.cost, 6);
    attempts_by_task[a.task_id].push_back(std::move(aj));
  }
  j["per_task"] = nlohmann::ordered_json::array();
  for (const auto& [task_id, total] : report.per_task) {
    nlohmann::ordered_json tj;
    tj["task_id"] = task_id;
    tj["total"] = rational_to_decimal(total, 6);
    tj["attempts"] = std::move(attempts_by_task[task_id]);
    j["per_task"].push_back(std::move(tj));
  }
  return j.dump(2) + "\n";
}

}  // namespace flowsim
