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

#include <doctest.h>

#include <nlohmann/json.hpp>
#include <random>

#include "flowsim/engine.hpp"
#include "flowsim/pricing.hpp"
#include "flowsim/rational.hpp"

using namespace flowsim;

namespace {

BillingScheme faas_scheme(const char* rate = "0.002", const char* fee = "0") {
  BillingScheme s;
  s.kind = BillingScheme::Kind::faas_blocks;
  s.block_ms = 100;
  s.rate_per_gb_block = rational_from_decimal(rate);
  s.per_request_fee = rational_from_decimal(fee);
  return s;
}

BillingScheme caas_scheme(const char* vcpu_rate = "0.01", const char* gb_rate = "0.001",
                          const char* min_s = "60") {
  BillingScheme s;
  s.kind = BillingScheme::Kind::caas_seconds;
  s.rate_per_vcpu_s = rational_from_decimal(vcpu_rate);
  s.rate_per_gb_s = rational_from_decimal(gb_rate);
  s.min_billable_s = rational_from_decimal(min_s);
  return s;
}

TaskAttempt attempt(const std::string& task_id, int no, const std::string& executor,
                    double setup_start, double exec_start, double end, int memory_mb, double vcpu,
                    int throttles = 0) {
  TaskAttempt a;
  a.task_id = task_id;
  a.group = "g";
  a.attempt_no = no;
  a.executor = executor;
  a.scheduled_t = setup_start;
  a.setup_start_t = setup_start;
  a.exec_start_t = exec_start;
  a.end_t = end;
  a.setup_s = exec_start - setup_start;
  a.exec_s = end - exec_start;
  a.outcome = AttemptOutcome::success;
  a.allocation = {memory_mb, vcpu};
  a.throttle_events = throttles;
  return a;
}

}  // namespace

TEST_CASE("rational parsing and formatting") {
  CHECK(rational_from_decimal("0.002") == Rational(2, 1000));
  CHECK(rational_from_decimal("-1.5") == Rational(-3, 2));
  CHECK(rational_from_decimal("1.7e-6") == Rational(17, 10'000'000));
  CHECK(rational_from_decimal("25") == Rational(25));
  CHECK(rational_from_decimal("2.5E+2") == Rational(250));
  CHECK_THROWS_AS(rational_from_decimal("abc"), std::invalid_argument);
  CHECK_THROWS_AS(rational_from_decimal("1.2.3"), std::invalid_argument);
  CHECK_THROWS_AS(rational_from_decimal(""), std::invalid_argument);

  CHECK(rational_from_json(nlohmann::json::parse("0.002")) == Rational(2, 1000));
  CHECK(rational_from_json(nlohmann::json::parse("\"0.002\"")) == Rational(2, 1000));
  CHECK(rational_from_json(nlohmann::json::parse("42")) == Rational(42));
  CHECK(rational_from_json(nlohmann::json::parse("1e-6")) == Rational(1, 1'000'000));

  CHECK(rational_to_decimal(Rational(1, 3), 6) == "0.333333");
  CHECK(rational_to_decimal(Rational(2, 3), 6) == "0.666667");
  CHECK(rational_to_decimal(Rational(6, 1000), 6) == "0.006000");
  CHECK(rational_to_decimal(Rational(0), 6) == "0.000000");
  CHECK(rational_to_decimal(Rational(-1, 2), 2) == "-0.50");
  CHECK(rational_to_decimal(Rational(144, 100), 6) == "1.440000");

  CHECK(rational_ceil(Rational(101, 100)) == 2);
  CHECK(rational_ceil(Rational(1)) == 1);
  CHECK(rational_ceil(Rational(-3, 2)) == -1);

  CHECK(rational_from_double(0.5) == Rational(1, 2));
}

TEST_CASE("billable_blocks: every started block counts") {
  CHECK(billable_blocks(Rational(0), 100) == 0);
  CHECK(billable_blocks(Rational(101), 100) == 2);
  CHECK(billable_blocks(Rational(100), 100) == 1);
  CHECK(billable_blocks(Rational(1), 100) == 1);
  CHECK(billable_blocks(rational_from_double(250.0), 100) == 3);
}

TEST_CASE("bill_faas") {
  const BillingScheme s = faas_scheme();
  CHECK(bill_faas(s, Rational(0), 1024) == Rational(0));
  // 250 ms -> 3 started blocks, 1024 MB is exactly 1 GB
  CHECK(bill_faas(s, Rational(250), 1024) == Rational(6, 1000));
  // linear in memory at fixed blocks
  CHECK(bill_faas(s, Rational(250), 2048) == 2 * bill_faas(s, Rational(250), 1024));
  CHECK_THROWS_AS(bill_faas(caas_scheme(), Rational(1), 128), PricingError);
}

TEST_CASE("bill_caas") {
  const BillingScheme s = caas_scheme();
  // 10 s run bills the 60 s minimum: 60 x (1 x 0.01 + 2 x 0.001)
  CHECK(bill_caas(s, Rational(10), Rational(1), Rational(2)) == Rational(72, 100));
  // above the minimum, every started second counts
  CHECK(bill_caas(s, Rational(120), Rational(1), Rational(2)) == Rational(144, 100));
  CHECK(bill_caas(s, rational_from_decimal("60.5"), Rational(1), Rational(2)) ==
        Rational(61) * Rational(12, 1000));
  CHECK_THROWS_AS(bill_caas(faas_scheme(), Rational(1), Rational(1), Rational(1)), PricingError);
}

TEST_CASE("billing monotonicity and caas floor") {
  std::mt19937_64 rng(3);
  const BillingScheme fs = faas_scheme("0.0017", "0.0000002");
  const BillingScheme cs = caas_scheme();
  for (int i = 0; i < 200; ++i) {
    const double d1 = std::uniform_real_distribution<double>(0, 5000)(rng);
    const double d2 = d1 + std::uniform_real_distribution<double>(0, 1000)(rng);
    const int m1 = std::uniform_int_distribution<int>(128, 4096)(rng);
    const int m2 = m1 + std::uniform_int_distribution<int>(0, 1024)(rng);
    CHECK(bill_faas(fs, rational_from_double(d1), m1) <= bill_faas(fs, rational_from_double(d2), m1));
    CHECK(bill_faas(fs, rational_from_double(d1), m1) <= bill_faas(fs, rational_from_double(d1), m2));
    const Rational v1(1), v2(2);
    CHECK(bill_caas(cs, rational_from_double(d1), v1, Rational(1)) <=
          bill_caas(cs, rational_from_double(d2), v1, Rational(1)));
    CHECK(bill_caas(cs, rational_from_double(d1), v1, Rational(1)) <=
          bill_caas(cs, rational_from_double(d1), v2, Rational(1)));
    // floor: never below the minimum bundle
    CHECK(bill_caas(cs, rational_from_double(d1), v1, Rational(1)) >=
          Rational(60) * (Rational(1, 100) + Rational(1, 1000)));
  }
}

TEST_CASE("cost_report bills lifecycles, fees cover throttled submissions") {
  std::map<std::string, BillingScheme> schemes;
  schemes["faas"] = faas_scheme("0.002", "0.0001");
  schemes["caas"] = caas_scheme();

  ExecutionTrace trace;
  trace.workflow_name = "w";

  SUBCASE("empty trace totals zero") {
    const CostReport report = cost_report(trace, schemes);
    CHECK(report.grand_total == Rational(0));
    CHECK(report.per_attempt.empty());
  }

  SUBCASE("two identical caas attempts cost exactly twice one") {
    trace.attempts = {attempt("t1", 1, "caas", 0, 5, 10, 1024, 1.0),
                      attempt("t2", 1, "caas", 0, 5, 10, 1024, 1.0)};
    const CostReport report = cost_report(trace, schemes);
    CHECK(report.per_attempt.size() == 2);
    CHECK(report.per_attempt[0].cost == report.per_attempt[1].cost);
    CHECK(report.grand_total == 2 * report.per_attempt[0].cost);
    // lifetime 10 s bills the 60 s floor: 60 x (0.01 + 0.001)
    CHECK(report.per_attempt[0].cost == Rational(60) * Rational(11, 1000));
  }

  SUBCASE("throttled submissions cost the per-request fee only") {
    // hand-computed: one faas attempt, 250 ms exec, 1 GB, throttled twice
    // before admission. duration cost = 3 x 0.002 = 0.006; fees = 3 x 0.0001
    // (one admitted submission + two throttled ones)
    trace.attempts = {attempt("t1", 1, "faas", 0, 0, 0.25, 1024, 1.0, 2)};
    const CostReport report = cost_report(trace, schemes);
    CHECK(report.grand_total == Rational(6, 1000) + 3 * Rational(1, 10000));
  }

  SUBCASE("missing scheme is an error") {
    trace.attempts = {attempt("t1", 1, "ghost", 0, 0, 1, 128, 1.0)};
    CHECK_THROWS_AS(cost_report(trace, schemes), PricingError);
  }
}

TEST_CASE("cost_report: caas bills the provisioned span, faas the execution span") {
  std::map<std::string, BillingScheme> schemes;
  schemes["faas"] = faas_scheme();
  schemes["caas"] = caas_scheme("0.01", "0", "0");

  ExecutionTrace trace;
  // container admitted at t=100, live until t=400: 300 s of lifetime even
  // though execution was only 100 s
  trace.attempts = {attempt("c", 1, "caas", 100, 300, 400, 1024, 1.0)};
  CHECK(cost_report(trace, schemes).grand_total == Rational(300) * Rational(1, 100));

  // function billed for its 100 s execution only
  trace.attempts = {attempt("f", 1, "faas", 100, 300, 400, 1024, 1.0)};
  // 100 s = 1000 blocks x 0.002 x 1 GB
  CHECK(cost_report(trace, schemes).grand_total == Rational(2));
}

TEST_CASE("cost report totals are exact sums and serialize at 6 places") {
  std::map<std::string, BillingScheme> schemes;
  schemes["faas"] = faas_scheme("0.0000017", "0.0000002");
  ExecutionTrace trace;
  for (int i = 0; i < 100; ++i) {
    trace.attempts.push_back(
        attempt("t" + std::to_string(i), 1, "faas", i, i + 0.5, i + 0.7321, 1536, 1.0, i % 3));
  }
  const CostReport report = cost_report(trace, schemes);
  Rational sum;
  for (const auto& a : report.per_attempt) sum += a.cost;
  CHECK(sum == report.grand_total);  // exact, no drift

  Rational by_exec;
  for (const auto& [name, total] : report.per_executor) by_exec += total;
  CHECK(by_exec == report.grand_total);

  const std::string json_text = serialize_cost_report(report);
  const auto j = nlohmann::json::parse(json_text);
  CHECK(j.at("grand_total").get<std::string>() ==
        rational_to_decimal(report.grand_total, 6));
  CHECK(j.at("per_task").size() == 100);
}
