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

#include "flowsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace flowsim {

std::vector<GroupStats> group_stats(const ExecutionTrace& trace) {
  if (trace.attempts.empty()) throw std::invalid_argument("group_stats on an empty trace");

  std::map<std::string, std::vector<const TaskAttempt*>> by_group;
  for (const auto& a : trace.attempts) {
    if (a.outcome == AttemptOutcome::success) by_group[a.group].push_back(&a);
  }

  std::vector<GroupStats> stats;
  for (const auto& [group, attempts] : by_group) {
    GroupStats g;
    g.group = group;
    g.count = static_cast<std::int64_t>(attempts.size());
    Rational setup_sum, exec_sum;
    g.min_setup_s = g.min_exec_s = std::numeric_limits<double>::infinity();
    for (const auto* a : attempts) {
      setup_sum += rational_from_double(a->setup_s);
      exec_sum += rational_from_double(a->exec_s);
      g.min_setup_s = std::min(g.min_setup_s, a->setup_s);
      g.max_setup_s = std::max(g.max_setup_s, a->setup_s);
      g.min_exec_s = std::min(g.min_exec_s, a->exec_s);
      g.max_exec_s = std::max(g.max_exec_s, a->exec_s);
    }
    g.mean_setup_s = setup_sum / g.count;
    g.mean_exec_s = exec_sum / g.count;
    const double mean_setup = static_cast<double>(g.mean_setup_s);
    const double mean_exec = static_cast<double>(g.mean_exec_s);
    double var_setup = 0, var_exec = 0;
    for (const auto* a : attempts) {
      var_setup += (a->setup_s - mean_setup) * (a->setup_s - mean_setup);
      var_exec += (a->exec_s - mean_exec) * (a->exec_s - mean_exec);
    }
    g.stddev_setup_s = std::sqrt(var_setup / static_cast<double>(g.count));
    g.stddev_exec_s = std::sqrt(var_exec / static_cast<double>(g.count));
    stats.push_back(std::move(g));
  }
  return stats;  // std::map iteration is already sorted by group
}

namespace {

std::vector<const TaskAttempt*> sorted_attempts(const ExecutionTrace& trace) {
  std::vector<const TaskAttempt*> rows;
  rows.reserve(trace.attempts.size());
  for (const auto& a : trace.attempts) rows.push_back(&a);
  std::sort(rows.begin(), rows.end(), [](const TaskAttempt* a, const TaskAttempt* b) {
    if (a->scheduled_t != b->scheduled_t) return a->scheduled_t < b->scheduled_t;
    if (a->task_id != b->task_id) return a->task_id < b->task_id;
    return a->attempt_no < b->attempt_no;
  });
  return rows;
}

// Greedy first-fit over attempts ordered by interval start. For interval
// graphs this uses exactly as many lanes as the largest overlap clique.
std::map<const TaskAttempt*, int> flattened_lanes(const ExecutionTrace& trace) {
  std::vector<const TaskAttempt*> order;
  order.reserve(trace.attempts.size());
  for (const auto& a : trace.attempts) order.push_back(&a);
  std::sort(order.begin(), order.end(), [](const TaskAttempt* a, const TaskAttempt* b) {
    if (a->setup_start_t != b->setup_start_t) return a->setup_start_t < b->setup_start_t;
    if (a->task_id != b->task_id) return a->task_id < b->task_id;
    return a->attempt_no < b->attempt_no;
  });

  std::map<const TaskAttempt*, int> lane_of;
  std::vector<double> lane_end;
  for (const auto* a : order) {
    int lane = -1;
    for (std::size_t i = 0; i < lane_end.size(); ++i) {
      if (lane_end[i] <= a->setup_start_t) {
        lane = static_cast<int>(i);
        break;
      }
    }
    if (lane < 0) {
      lane = static_cast<int>(lane_end.size());
      lane_end.push_back(0);
    }
    lane_end[static_cast<std::size_t>(lane)] = a->end_t;
    lane_of[a] = lane;
  }
  return lane_of;
}

}  // namespace

std::string export_gantt_csv(const ExecutionTrace& trace, GanttMode mode) {
  const auto rows = sorted_attempts(trace);

  std::map<const TaskAttempt*, int> lane_of;
  if (mode == GanttMode::flattened) {
    lane_of = flattened_lanes(trace);
  } else {
    std::map<std::string, int> task_lane;
    for (const auto* a : rows) {
      if (!task_lane.count(a->task_id)) {
        const int next = static_cast<int>(task_lane.size());
        task_lane[a->task_id] = next;
      }
      lane_of[a] = task_lane[a->task_id];
    }
  }

  std::ostringstream out;
  out << "task_id,group,lane,scheduled_t,exec_start_t,end_t,setup_s,exec_s,executor,cold\n";
  for (const auto* a : rows) {
    out << a->task_id << ',' << a->group << ',' << lane_of[a] << ','
        << format_double(a->scheduled_t) << ',' << format_double(a->exec_start_t) << ','
        << format_double(a->end_t) << ',' << format_double(a->setup_s) << ','
        << format_double(a->exec_s) << ',' << a->executor << ',' << (a->cold ? "true" : "false")
        << "\n";
  }
  return out.str();
}

std::int64_t measure_burst(const ExecutionTrace& trace, const std::string& executor) {
  const auto it = trace.executor_counters.find(executor);
  if (it == trace.executor_counters.end()) {
    throw std::invalid_argument("unknown executor in trace: " + executor);
  }
  return it->second.admitted_before_first_throttle;
}

std::vector<std::pair<double, int>> concurrency_timeline(const ExecutionTrace& trace,
                                                         const std::string& executor) {
  std::map<double, int> deltas;
  for (const auto& a : trace.attempts) {
    if (a.executor != executor) continue;
    ++deltas[a.setup_start_t];
    --deltas[a.end_t];
  }
  std::vector<std::pair<double, int>> steps;
  int running = 0;
  for (const auto& [t, d] : deltas) {
    if (d == 0) continue;  // simultaneous admission and release cancel out
    running += d;
    steps.emplace_back(t, running);
  }
  return steps;
}

std::string serialize_stats(const ExecutionTrace& trace) {
  nlohmann::ordered_json j;
  j["workflow_name"] = trace.workflow_name;
  j["seed"] = trace.seed;
  j["makespan_s"] = trace.makespan_s;
  j["complete"] = trace.complete;
  j["groups"] = nlohmann::ordered_json::array();
  if (!trace.attempts.empty()) {
    for (const auto& g : group_stats(trace)) {
      nlohmann::ordered_json gj;
      gj["group"] = g.group;
      gj["count"] = g.count;
      gj["mean_setup_s"] = rational_to_decimal(g.mean_setup_s, 6);
      gj["mean_exec_s"] = rational_to_decimal(g.mean_exec_s, 6);
      gj["min_setup_s"] = g.min_setup_s;
      gj["max_setup_s"] = g.max_setup_s;
      gj["stddev_setup_s"] = g.stddev_setup_s;
      gj["min_exec_s"] = g.min_exec_s;
      gj["max_exec_s"] = g.max_exec_s;
      gj["stddev_exec_s"] = g.stddev_exec_s;
      j["groups"].push_back(std::move(gj));
    }
  }
  j["executors"] = nlohmann::ordered_json::object();
  for (const auto& [name, c] : trace.executor_counters) {
    nlohmann::ordered_json cj;
    cj["admitted"] = c.admitted;
    cj["throttled"] = c.throttled;
    cj["cold_starts"] = c.cold_starts;
    cj["warm_starts"] = c.warm_starts;
    cj["burst"] = c.admitted_before_first_throttle;
    cj["peak_running"] = c.peak_running;
    j["executors"][name] = std::move(cj);
  }
  j["failed_tasks"] = nlohmann::ordered_json::array();
  for (const auto& f : trace.failed_tasks) {
    nlohmann::ordered_json fj;
    fj["task_id"] = f.task_id;
    fj["reason"] = f.reason;
    j["failed_tasks"].push_back(std::move(fj));
  }
  return j.dump(2) + "\n";
}

}  // namespace flowsim
