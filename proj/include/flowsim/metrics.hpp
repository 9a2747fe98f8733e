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

#include <string>
#include <utility>
#include <vector>

#include "flowsim/engine.hpp"
#include "flowsim/rational.hpp"

namespace flowsim {

/// Setup/execution statistics for one task group, over successful attempts.
struct GroupStats {
  std::string group;
  std::int64_t count = 0;
  Rational mean_setup_s;  // exact
  Rational mean_exec_s;   // exact
  double min_setup_s = 0.0, max_setup_s = 0.0, stddev_setup_s = 0.0;
  double min_exec_s = 0.0, max_exec_s = 0.0, stddev_exec_s = 0.0;
};

/// One entry per group with successful attempts, sorted by group name.
/// Throws std::invalid_argument on a trace with no attempts.
std::vector<GroupStats> group_stats(const ExecutionTrace& trace);

enum class GanttMode {
  per_task,   // one lane per task; retries share the task's lane
  flattened,  // greedy first-fit lane packing of attempt intervals
};

/// CSV with header task_id,group,lane,scheduled_t,exec_start_t,end_t,setup_s,
/// exec_s,executor,cold; rows sorted by (scheduled_t, task_id, attempt_no).
std::string export_gantt_csv(const ExecutionTrace& trace, GanttMode mode);

/// Admissions on the executor strictly before its first throttle; total
/// admissions when nothing throttled. Throws on an unknown executor.
std::int64_t measure_burst(const ExecutionTrace& trace, const std::string& executor);

/// Step function of running containers from admission/release times. Points
/// at equal times are merged.
std::vector<std::pair<double, int>> concurrency_timeline(const ExecutionTrace& trace,
                                                         const std::string& executor);

/// Bundle for stats.json: group stats, makespan, executor counters.
std::string serialize_stats(const ExecutionTrace& trace);

}  // namespace flowsim
