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
#include <string>
#include <vector>

#include "flowsim/executors.hpp"
#include "flowsim/routing.hpp"
#include "flowsim/workflow.hpp"

namespace flowsim {

struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No executor can run a task; message carries the per-profile constraint.
struct UnroutableError : EngineError {
  using EngineError::EngineError;
};

enum class AttemptOutcome { success, timeout, throttled_retry, failed };

const char* to_string(AttemptOutcome outcome);

/*
 * One container lifecycle for one task. Setup spans scheduling to the start
 * of the task's command inside the container (admission waits, cold start
 * and input staging included); execution spans the command start to
 * completion, output upload included.
 */
struct TaskAttempt {
  std::string task_id;
  std::string group;
  int attempt_no = 1;
  std::string executor;
  double scheduled_t = 0.0;
  double setup_start_t = 0.0;  // admission; container provisioning begins
  double exec_start_t = 0.0;
  double end_t = 0.0;
  double setup_s = 0.0;  // exec_start_t - scheduled_t
  double exec_s = 0.0;   // end_t - exec_start_t
  AttemptOutcome outcome = AttemptOutcome::success;
  bool cold = true;
  Allocation allocation;
  int throttle_events = 0;  // submissions rejected by the bucket before this admission
};

struct FailedTask {
  std::string task_id;
  std::string reason;
};

struct ExecutionTrace {
  std::string workflow_name;
  std::uint64_t seed = 0;
  std::string profiles_hash;
  std::vector<TaskAttempt> attempts;
  double makespan_s = 0.0;
  std::map<std::string, ExecutorCounters> executor_counters;
  bool complete = true;
  std::vector<FailedTask> failed_tasks;
};

struct BackoffPolicy {
  double initial_s = 1.0;
  double multiplier = 2.0;
  double max_s = 30.0;
};

struct EngineConfig {
  int max_task_retries = 3;  // timeouts/failures; throttles never count
  BackoffPolicy throttle_backoff;
  std::uint64_t seed = 0;
  // optional client-side submission latency, uniform in [0, jitter]; off by
  // default so traces stay analytically checkable
  double submit_jitter_s = 0.0;
};

struct RetryDecision {
  bool retry = false;
  double delay_s = 0.0;
};

/// Retry policy for a non-successful attempt: throttles back off geometrically
/// and are never budgeted; timeouts and failures consume one of
/// max_task_retries each.
RetryDecision retry_decision(const TaskAttempt& attempt, const EngineConfig& cfg);

/*
 * Discrete-event enactment of a workflow over executor states, one container
 * lifecycle per task attempt and no engine-side task queue. Dependency-free
 * tasks are scheduled at t=0; completions schedule newly ready tasks
 * immediately. Throttled submissions retry after max(retry_after, backoff);
 * submissions against a full executor wait for the next release, FIFO by
 * (scheduled time, task id). Simultaneous events process in
 * (time, task id, attempt) order, so traces are bit-reproducible for a fixed
 * seed. States are reset for a fresh run (warm pools persist); see
 * ExecutorState::begin_run.
 */
ExecutionTrace run(const Workflow& w, const RoutingPolicy& policy,
                   std::map<std::string, ExecutorState>& states, const EngineConfig& cfg);

/// JSON Lines: header {workflow_name, seed, profiles_hash}, one attempt per
/// line, and a trailer with makespan, counters and completion state. Field
/// order is fixed; serialization is byte-deterministic.
std::string serialize_trace(const ExecutionTrace& trace);
ExecutionTrace deserialize_trace(const std::string& jsonl);

/// FNV-1a over the canonical profile serialization, for the trace header.
std::string profiles_hash(const std::map<std::string, ExecutorState>& states);

}  // namespace flowsim
