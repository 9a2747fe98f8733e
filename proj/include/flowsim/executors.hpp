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
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "flowsim/pricing.hpp"
#include "flowsim/workflow.hpp"

namespace flowsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExecutorKind { faas, caas };

/// A serverless platform model: resource ranges, admission limits, overheads
/// and billing. The repository ships three defaults ("lambda-like",
/// "fargate-like", "cloudrun-like"); every number is a config input.
struct ExecutorProfile {
  std::string name;
  ExecutorKind kind = ExecutorKind::caas;
  int memory_mb_min = 128;
  int memory_mb_max = 3008;
  double vcpu_min = 0.25;
  double vcpu_max = 4.0;
  double mem_per_vcpu_mb = 1792.0;  // faas only: memory granting one vCPU
  double max_exec_s = std::numeric_limits<double>::infinity();  // container lifetime cap
  int max_concurrency = 100;
  int burst_capacity = 38;       // token bucket size for admissions
  double burst_refill_per_s = 2.0;
  double cold_start_s_min = 0.0;
  double cold_start_s_max = 0.0;
  double clock_ghz = 2.9;
  int disk_mb = 0;
  bool disk_uses_memory = false;  // disk quota equals allocated memory
  bool reusable = false;          // released containers join a warm pool
  double staging_bandwidth_mbps = 100.0;
  double staging_latency_s = 0.0;
  BillingScheme billing;

  bool unbounded_exec() const { return !(max_exec_s < std::numeric_limits<double>::infinity()); }
};

struct AllocationRequest {
  int memory_mb = 0;
  std::optional<double> vcpu;  // required for caas, ignored for faas
};

struct Allocation {
  int memory_mb = 0;
  double vcpu = 0.0;  // effective share after derivation/clamping
};

struct ExecutorCounters {
  std::int64_t admitted = 0;
  std::int64_t throttled = 0;
  std::int64_t cold_starts = 0;
  std::int64_t warm_starts = 0;
  // admissions seen strictly before the first throttle; equals `admitted`
  // when nothing throttled. This is the per-run burst measurement.
  std::int64_t admitted_before_first_throttle = 0;
  bool saw_throttle = false;
  int peak_running = 0;
};

/*
 * Mutable per-executor simulation state. Admission is a token bucket layered
 * under a hard concurrency ceiling; warm containers are an unbounded pool
 * that survives across runs within one simulator session. begin_run() starts
 * a fresh sim clock: tokens refill to capacity and counters reset, while the
 * warm pool carries over (consecutive workflow runs are assumed far enough
 * apart in wall-clock time for the admission bucket to recover).
 */
struct ExecutorState {
  ExecutorProfile profile;
  int running = 0;
  double burst_tokens = 0.0;
  double last_refill_t = 0.0;
  std::int64_t warm_pool = 0;
  ExecutorCounters counters;

  explicit ExecutorState(ExecutorProfile p)
      : profile(std::move(p)), burst_tokens(static_cast<double>(profile.burst_capacity)) {}

  void begin_run();
};

struct AdmitResult {
  enum class Outcome { admitted_cold, admitted_warm, throttled, capacity_full };
  Outcome outcome;
  double retry_after_s = 0.0;  // set for throttled; infinity when refill is 0

  bool admitted() const {
    return outcome == Outcome::admitted_cold || outcome == Outcome::admitted_warm;
  }
};

/// FaaS derives the share from memory; CaaS clamps the requested share.
double effective_vcpu(const ExecutorProfile& profile, const AllocationRequest& request);

/// work / (clock x usable cores); zero-work tasks take zero time.
double compute_time_s(const ExecutorProfile& profile, const Task& task, const Allocation& alloc);

/// latency + transfer time at the profile's staging bandwidth.
double staging_time_s(const ExecutorProfile& profile, std::uint64_t total_bytes);

/// One admission decision at sim time `now`: refill tokens, then check the
/// concurrency ceiling, then the bucket. Admissions consume one token and
/// prefer a warm container when the pool is non-empty.
AdmitResult try_admit(ExecutorState& state, double now);

/// Uniform draw from [cold_start_s_min, cold_start_s_max]; warm admissions
/// never pay this.
double sample_cold_start_s(const ExecutorProfile& profile, std::mt19937_64& rng);

/// Container teardown: frees the concurrency slot and, for reusable
/// profiles, returns the container to the warm pool.
void release(ExecutorState& state, double now);

/// Allocation the engine makes for a task on a profile: memory clamped into
/// the profile range, vCPU derived from it (faas) or from the task's
/// parallelism (caas).
Allocation make_allocation(const ExecutorProfile& profile, const Task& task);

/// Disk quota a task would see: allocated memory on memory-backed profiles.
int effective_disk_quota_mb(const ExecutorProfile& profile, int allocated_memory_mb);

ExecutorProfile profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const ExecutorProfile& profile);

/// Loads {"profiles": [...]} or a bare array of profile objects.
std::vector<ExecutorProfile> load_profiles(const std::string& json_text);

/// The three shipped defaults (also available in configs/profiles.json).
std::vector<ExecutorProfile> default_profiles();

}  // namespace flowsim
