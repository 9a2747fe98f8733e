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

#include "flowsim/executors.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace flowsim {

void ExecutorState::begin_run() {
  if (running != 0) {
    throw std::logic_error("begin_run with containers still running on " + profile.name);
  }
  burst_tokens = static_cast<double>(profile.burst_capacity);
  last_refill_t = 0.0;
  counters = ExecutorCounters{};
}

double effective_vcpu(const ExecutorProfile& profile, const AllocationRequest& request) {
  if (profile.kind == ExecutorKind::faas) {
    return std::min(static_cast<double>(request.memory_mb) / profile.mem_per_vcpu_mb,
                    profile.vcpu_max);
  }
  if (!request.vcpu) {
    throw std::invalid_argument("caas allocation request for " + profile.name +
                                " must specify vcpu");
  }
  return std::clamp(*request.vcpu, profile.vcpu_min, profile.vcpu_max);
}

double compute_time_s(const ExecutorProfile& profile, const Task& task, const Allocation& alloc) {
  if (task.work_gcs == 0.0) return 0.0;
  const double usable = std::min(alloc.vcpu, static_cast<double>(task.parallelism));
  return task.work_gcs / (profile.clock_ghz * usable);
}

double staging_time_s(const ExecutorProfile& profile, std::uint64_t total_bytes) {
  double transfer = 0.0;
  if (total_bytes > 0) {
    transfer = static_cast<double>(total_bytes) * 8.0 / (profile.staging_bandwidth_mbps * 1e6);
  }
  return profile.staging_latency_s + transfer;
}

AdmitResult try_admit(ExecutorState& state, double now) {
  if (now < state.last_refill_t) {
    throw std::logic_error("try_admit with a clock running backwards on " + state.profile.name);
  }
  state.burst_tokens = std::min(static_cast<double>(state.profile.burst_capacity),
                                state.burst_tokens +
                                    (now - state.last_refill_t) * state.profile.burst_refill_per_s);
  state.last_refill_t = now;

  if (state.running >= state.profile.max_concurrency) {
    return {AdmitResult::Outcome::capacity_full, 0.0};
  }
  if (state.burst_tokens < 1.0) {
    ++state.counters.throttled;
    state.counters.saw_throttle = true;
    const double retry_after =
        state.profile.burst_refill_per_s > 0.0
            ? (1.0 - state.burst_tokens) / state.profile.burst_refill_per_s
            : std::numeric_limits<double>::infinity();
    return {AdmitResult::Outcome::throttled, retry_after};
  }

  state.burst_tokens -= 1.0;
  ++state.running;
  state.counters.peak_running = std::max(state.counters.peak_running, state.running);
  ++state.counters.admitted;
  if (!state.counters.saw_throttle) {
    state.counters.admitted_before_first_throttle = state.counters.admitted;
  }
  if (state.warm_pool > 0) {
    --state.warm_pool;
    ++state.counters.warm_starts;
    return {AdmitResult::Outcome::admitted_warm, 0.0};
  }
  ++state.counters.cold_starts;
  return {AdmitResult::Outcome::admitted_cold, 0.0};
}

double sample_cold_start_s(const ExecutorProfile& profile, std::mt19937_64& rng) {
  // Hand-rolled uniform so that draws are identical across standard library
  // implementations.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return profile.cold_start_s_min + u * (profile.cold_start_s_max - profile.cold_start_s_min);
}

void release(ExecutorState& state, double /*now*/) {
  if (state.running <= 0) {
    throw std::logic_error("release with no running containers on " + state.profile.name);
  }
  --state.running;
  if (state.profile.reusable) ++state.warm_pool;
}

Allocation make_allocation(const ExecutorProfile& profile, const Task& task) {
  AllocationRequest request;
  request.memory_mb = std::clamp(task.memory_mb, profile.memory_mb_min, profile.memory_mb_max);
  if (profile.kind == ExecutorKind::caas) {
    request.vcpu = static_cast<double>(task.parallelism);
  }
  return {request.memory_mb, effective_vcpu(profile, request)};
}

int effective_disk_quota_mb(const ExecutorProfile& profile, int allocated_memory_mb) {
  return profile.disk_uses_memory ? allocated_memory_mb : profile.disk_mb;
}

namespace {

template <typename T>
T json_field(const nlohmann::json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing field '" + std::string(key) + "' in " + where);
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("wrong type for field '" + std::string(key) + "' in " + where);
  }
}

}  // namespace

BillingScheme billing_scheme_from_json(const nlohmann::json& j) {
  BillingScheme s;
  const std::string kind = json_field<std::string>(j, "kind", "billing scheme");
  if (kind == "faas_blocks") {
    s.kind = BillingScheme::Kind::faas_blocks;
    s.block_ms = json_field<int>(j, "block_ms", "billing scheme");
    if (s.block_ms < 1) throw ConfigError("block_ms must be >= 1");
    s.rate_per_gb_block = rational_from_json(j.at("rate_per_gb_block"));
  } else if (kind == "caas_seconds") {
    s.kind = BillingScheme::Kind::caas_seconds;
    s.rate_per_vcpu_s = rational_from_json(j.at("rate_per_vcpu_s"));
    s.rate_per_gb_s = rational_from_json(j.at("rate_per_gb_s"));
    if (j.contains("min_billable_s")) s.min_billable_s = rational_from_json(j.at("min_billable_s"));
  } else {
    throw ConfigError("unknown billing scheme kind: " + kind);
  }
  if (j.contains("per_request_fee")) s.per_request_fee = rational_from_json(j.at("per_request_fee"));
  if (s.rate_per_gb_block < 0 || s.rate_per_vcpu_s < 0 || s.rate_per_gb_s < 0 ||
      s.min_billable_s < 0 || s.per_request_fee < 0) {
    throw ConfigError("billing rates must be non-negative");
  }
  return s;
}

nlohmann::json billing_scheme_to_json(const BillingScheme& s) {
  nlohmann::ordered_json j;
  if (s.kind == BillingScheme::Kind::faas_blocks) {
    j["kind"] = "faas_blocks";
    j["block_ms"] = s.block_ms;
    j["rate_per_gb_block"] = rational_to_decimal(s.rate_per_gb_block, 12);
  } else {
    j["kind"] = "caas_seconds";
    j["rate_per_vcpu_s"] = rational_to_decimal(s.rate_per_vcpu_s, 12);
    j["rate_per_gb_s"] = rational_to_decimal(s.rate_per_gb_s, 12);
    j["min_billable_s"] = rational_to_decimal(s.min_billable_s, 6);
  }
  j["per_request_fee"] = rational_to_decimal(s.per_request_fee, 12);
  return j;
}

ExecutorProfile profile_from_json(const nlohmann::json& j) {
  ExecutorProfile p;
  p.name = json_field<std::string>(j, "name", "executor profile");
  const std::string where = "profile '" + p.name + "'";

  const std::string kind = json_field<std::string>(j, "kind", where);
  if (kind == "faas") {
    p.kind = ExecutorKind::faas;
  } else if (kind == "caas") {
    p.kind = ExecutorKind::caas;
  } else {
    throw ConfigError("unknown executor kind '" + kind + "' in " + where);
  }

  p.memory_mb_min = json_field<int>(j, "memory_mb_min", where);
  p.memory_mb_max = json_field<int>(j, "memory_mb_max", where);
  p.vcpu_min = json_field<double>(j, "vcpu_min", where);
  p.vcpu_max = json_field<double>(j, "vcpu_max", where);
  p.mem_per_vcpu_mb = j.value("mem_per_vcpu_mb", 1792.0);
  if (j.contains("max_exec_s") && !j.at("max_exec_s").is_null()) {
    p.max_exec_s = json_field<double>(j, "max_exec_s", where);
  } else {
    p.max_exec_s = std::numeric_limits<double>::infinity();
  }
  p.max_concurrency = json_field<int>(j, "max_concurrency", where);
  p.burst_capacity = json_field<int>(j, "burst_capacity", where);
  p.burst_refill_per_s = json_field<double>(j, "burst_refill_per_s", where);
  p.cold_start_s_min = json_field<double>(j, "cold_start_s_min", where);
  p.cold_start_s_max = json_field<double>(j, "cold_start_s_max", where);
  p.clock_ghz = json_field<double>(j, "clock_ghz", where);
  p.disk_mb = json_field<int>(j, "disk_mb", where);
  p.disk_uses_memory = j.value("disk_uses_memory", false);
  p.reusable = json_field<bool>(j, "reusable", where);
  p.staging_bandwidth_mbps = json_field<double>(j, "staging_bandwidth_mbps", where);
  p.staging_latency_s = json_field<double>(j, "staging_latency_s", where);
  p.billing = billing_scheme_from_json(j.at("billing"));

  if (p.memory_mb_min < 1 || p.memory_mb_max < p.memory_mb_min) {
    throw ConfigError("empty memory range in " + where);
  }
  if (p.vcpu_min <= 0 || p.vcpu_max < p.vcpu_min) throw ConfigError("empty vcpu range in " + where);
  if (p.kind == ExecutorKind::faas && p.mem_per_vcpu_mb <= 0) {
    throw ConfigError("mem_per_vcpu_mb must be positive in " + where);
  }
  if (p.max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1 in " + where);
  if (p.burst_capacity < 1) throw ConfigError("burst_capacity must be >= 1 in " + where);
  if (p.burst_refill_per_s < 0) throw ConfigError("burst_refill_per_s must be >= 0 in " + where);
  if (p.cold_start_s_min < 0 || p.cold_start_s_max < p.cold_start_s_min) {
    throw ConfigError("invalid cold start range in " + where);
  }
  if (p.clock_ghz <= 0) throw ConfigError("clock_ghz must be positive in " + where);
  if (p.staging_bandwidth_mbps <= 0) {
    throw ConfigError("staging_bandwidth_mbps must be positive in " + where);
  }
  if (p.staging_latency_s < 0) throw ConfigError("staging_latency_s must be >= 0 in " + where);
  if (!(p.max_exec_s > 0)) throw ConfigError("max_exec_s must be positive in " + where);
  return p;
}

nlohmann::json profile_to_json(const ExecutorProfile& p) {
  nlohmann::ordered_json j;
  j["name"] = p.name;
  j["kind"] = p.kind == ExecutorKind::faas ? "faas" : "caas";
  j["memory_mb_min"] = p.memory_mb_min;
  j["memory_mb_max"] = p.memory_mb_max;
  j["vcpu_min"] = p.vcpu_min;
  j["vcpu_max"] = p.vcpu_max;
  j["mem_per_vcpu_mb"] = p.mem_per_vcpu_mb;
  if (p.unbounded_exec()) {
    j["max_exec_s"] = nullptr;
  } else {
    j["max_exec_s"] = p.max_exec_s;
  }
  j["max_concurrency"] = p.max_concurrency;
  j["burst_capacity"] = p.burst_capacity;
  j["burst_refill_per_s"] = p.burst_refill_per_s;
  j["cold_start_s_min"] = p.cold_start_s_min;
  j["cold_start_s_max"] = p.cold_start_s_max;
  j["clock_ghz"] = p.clock_ghz;
  j["disk_mb"] = p.disk_mb;
  j["disk_uses_memory"] = p.disk_uses_memory;
  j["reusable"] = p.reusable;
  j["staging_bandwidth_mbps"] = p.staging_bandwidth_mbps;
  j["staging_latency_s"] = p.staging_latency_s;
  j["billing"] = billing_scheme_to_json(p.billing);
  return j;
}

std::vector<ExecutorProfile> load_profiles(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("profiles config syntax error: ") + e.what());
  }
  const nlohmann::json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("profiles")) throw ConfigError("profiles config must contain 'profiles'");
    arr = &j.at("profiles");
  }
  if (!arr->is_array() || arr->empty()) {
    throw ConfigError("profiles config must be a non-empty array of profiles");
  }
  std::vector<ExecutorProfile> profiles;
  for (const auto& pj : *arr) profiles.push_back(profile_from_json(pj));
  return profiles;
}

std::vector<ExecutorProfile> default_profiles() {
  // Table-derived limits; overheads, burst parameters and rates are
  // calibration placeholders (see README).
  auto mk_faas_billing = [] {
    BillingScheme b;
    b.kind = BillingScheme::Kind::faas_blocks;
    b.block_ms = 100;
    b.rate_per_gb_block = rational_from_decimal("0.0000017");
    b.per_request_fee = rational_from_decimal("0.0000002");
    return b;
  };
  auto mk_caas_billing = [](const char* vcpu_rate, const char* gb_rate, const char* min_s,
                            const char* fee) {
    BillingScheme b;
    b.kind = BillingScheme::Kind::caas_seconds;
    b.rate_per_vcpu_s = rational_from_decimal(vcpu_rate);
    b.rate_per_gb_s = rational_from_decimal(gb_rate);
    b.min_billable_s = rational_from_decimal(min_s);
    b.per_request_fee = rational_from_decimal(fee);
    return b;
  };

  ExecutorProfile lambda;
  lambda.name = "lambda-like";
  lambda.kind = ExecutorKind::faas;
  lambda.memory_mb_min = 128;
  lambda.memory_mb_max = 3008;
  lambda.vcpu_min = 0.05;
  lambda.vcpu_max = 2.0;
  lambda.mem_per_vcpu_mb = 1792.0;
  lambda.max_exec_s = 900.0;
  lambda.max_concurrency = 1000;
  lambda.burst_capacity = 500;
  lambda.burst_refill_per_s = 50.0;
  lambda.cold_start_s_min = 0.1;
  lambda.cold_start_s_max = 1.0;
  lambda.clock_ghz = 2.5;
  lambda.disk_mb = 512;
  lambda.reusable = false;
  lambda.staging_bandwidth_mbps = 200.0;
  lambda.staging_latency_s = 0.05;
  lambda.billing = mk_faas_billing();

  ExecutorProfile fargate;
  fargate.name = "fargate-like";
  fargate.kind = ExecutorKind::caas;
  fargate.memory_mb_min = 512;
  fargate.memory_mb_max = 30720;
  fargate.vcpu_min = 0.25;
  fargate.vcpu_max = 4.0;
  fargate.max_exec_s = std::numeric_limits<double>::infinity();
  fargate.max_concurrency = 100;
  fargate.burst_capacity = 38;
  fargate.burst_refill_per_s = 2.0;
  fargate.cold_start_s_min = 30.0;
  fargate.cold_start_s_max = 60.0;
  fargate.clock_ghz = 2.9;
  fargate.disk_mb = 10240;
  fargate.reusable = false;
  fargate.staging_bandwidth_mbps = 200.0;
  fargate.staging_latency_s = 0.1;
  fargate.billing = mk_caas_billing("0.0000113", "0.00000124", "60", "0");

  ExecutorProfile cloudrun;
  cloudrun.name = "cloudrun-like";
  cloudrun.kind = ExecutorKind::caas;
  cloudrun.memory_mb_min = 128;
  cloudrun.memory_mb_max = 2048;
  cloudrun.vcpu_min = 1.0;
  cloudrun.vcpu_max = 2.0;
  cloudrun.max_exec_s = 900.0;
  cloudrun.max_concurrency = 1000;
  cloudrun.burst_capacity = 100;
  cloudrun.burst_refill_per_s = 20.0;
  cloudrun.cold_start_s_min = 2.0;
  cloudrun.cold_start_s_max = 10.0;
  cloudrun.clock_ghz = 2.35;
  cloudrun.disk_mb = 0;
  cloudrun.disk_uses_memory = true;
  cloudrun.reusable = true;
  cloudrun.staging_bandwidth_mbps = 200.0;
  cloudrun.staging_latency_s = 0.05;
  cloudrun.billing = mk_caas_billing("0.000024", "0.0000025", "0", "0.0000004");

  return {lambda, fargate, cloudrun};
}

}  // namespace flowsim
