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

#include "flowsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace flowsim {

const char* to_string(AttemptOutcome outcome) {
  switch (outcome) {
    case AttemptOutcome::success: return "success";
    case AttemptOutcome::timeout: return "timeout";
    case AttemptOutcome::throttled_retry: return "throttled_retry";
    case AttemptOutcome::failed: return "failed";
  }
  return "unknown";
}

namespace {

AttemptOutcome outcome_from_string(const std::string& s) {
  if (s == "success") return AttemptOutcome::success;
  if (s == "timeout") return AttemptOutcome::timeout;
  if (s == "throttled_retry") return AttemptOutcome::throttled_retry;
  if (s == "failed") return AttemptOutcome::failed;
  throw EngineError("unknown attempt outcome: " + s);
}

double backoff_delay(const BackoffPolicy& b, int ordinal) {
  return std::min(b.initial_s * std::pow(b.multiplier, ordinal - 1), b.max_s);
}

}  // namespace

RetryDecision retry_decision(const TaskAttempt& attempt, const EngineConfig& cfg) {
  if (attempt.outcome == AttemptOutcome::success) {
    throw std::invalid_argument("retry_decision on a successful attempt");
  }
  if (attempt.outcome == AttemptOutcome::throttled_retry) {
    // Throttling is platform pushback, not task failure: retry forever,
    // backing off geometrically per rejection in this cycle.
    const int ordinal = std::max(attempt.throttle_events, 1);
    return {true, backoff_delay(cfg.throttle_backoff, ordinal)};
  }
  if (attempt.attempt_no > cfg.max_task_retries) return {false, 0.0};
  return {true, backoff_delay(cfg.throttle_backoff, attempt.attempt_no)};
}

namespace {

enum class EventKind { submit, finish };

// Total event order: time, then task id (by lexicographic rank), then
// attempt, then insertion sequence. The sequence keeps the order total;
// insertion is itself deterministic.
struct Event {
  double t;
  int task_rank;
  int attempt_no;
  std::uint64_t seq;
  EventKind kind;
  std::size_t attempt_index;  // finish events: index into the trace
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    if (a.task_rank != b.task_rank) return a.task_rank > b.task_rank;
    if (a.attempt_no != b.attempt_no) return a.attempt_no > b.attempt_no;
    return a.seq > b.seq;
  }
};

enum class Phase { blocked, pending, running, done, failed };

struct TaskRun {
  ExecutorState* state = nullptr;
  std::string executor;
  int unmet_inputs = 0;
  int next_attempt_no = 1;
  int throttle_events = 0;  // in the current submission cycle
  double cycle_scheduled_t = 0.0;
  Phase phase = Phase::blocked;
  std::uint64_t input_bytes = 0;
  std::uint64_t output_bytes = 0;
  int timeouts = 0;
};

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

nlohmann::ordered_json counters_to_json(const ExecutorCounters& c) {
  nlohmann::ordered_json j;
  j["admitted"] = c.admitted;
  j["throttled"] = c.throttled;
  j["cold_starts"] = c.cold_starts;
  j["warm_starts"] = c.warm_starts;
  j["admitted_before_first_throttle"] = c.admitted_before_first_throttle;
  j["peak_running"] = c.peak_running;
  return j;
}

ExecutorCounters counters_from_json(const nlohmann::json& j) {
  ExecutorCounters c;
  c.admitted = j.at("admitted").get<std::int64_t>();
  c.throttled = j.at("throttled").get<std::int64_t>();
  c.cold_starts = j.at("cold_starts").get<std::int64_t>();
  c.warm_starts = j.at("warm_starts").get<std::int64_t>();
  c.admitted_before_first_throttle = j.at("admitted_before_first_throttle").get<std::int64_t>();
  c.saw_throttle = c.throttled > 0;
  c.peak_running = j.at("peak_running").get<int>();
  return c;
}

}  // namespace

std::string profiles_hash(const std::map<std::string, ExecutorState>& states) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& [name, state] : states) {
    h = fnv1a(profile_to_json(state.profile).dump(), h);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

ExecutionTrace run(const Workflow& w, const RoutingPolicy& policy,
                   std::map<std::string, ExecutorState>& states, const EngineConfig& cfg) {
  if (cfg.max_task_retries < 0) throw EngineError("max_task_retries must be >= 0");
  if (cfg.throttle_backoff.multiplier < 1.0) throw EngineError("backoff multiplier must be >= 1");

  {
    const auto issues = validate_workflow(w);
    if (!issues.empty()) {
      throw EngineError("workflow does not validate: " + issues.front().message);
    }
  }

  std::map<std::string, ExecutorProfile> profiles;
  for (auto& [name, state] : states) {
    if (name != state.profile.name) {
      throw EngineError("executor state key '" + name + "' does not match profile name '" +
                        state.profile.name + "'");
    }
    state.begin_run();
    profiles.emplace(name, state.profile);
  }

  const WorkflowIndex idx(w);
  const std::size_t n = w.tasks.size();

  // rank = position of the task id in lexicographic order
  std::vector<std::size_t> by_rank(n);
  for (std::size_t i = 0; i < n; ++i) by_rank[i] = i;
  std::sort(by_rank.begin(), by_rank.end(),
            [&](std::size_t a, std::size_t b) { return w.tasks[a].id < w.tasks[b].id; });
  std::vector<int> rank_of(n);
  for (std::size_t r = 0; r < n; ++r) rank_of[by_rank[r]] = static_cast<int>(r);

  std::vector<TaskRun> runs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Task& task = w.tasks[i];
    TaskRun& tr = runs[i];
    std::string executor;
    try {
      executor = route(policy, task, profiles);
    } catch (const RoutingError& e) {
      throw UnroutableError(e.what());
    }
    tr.executor = executor;
    tr.state = &states.at(executor);
    for (const auto& in : task.inputs) {
      const std::size_t d = idx.data_by_id.at(in);
      tr.input_bytes += w.data[d].size_bytes;
      if (idx.producer_of[d] != WorkflowIndex::npos) ++tr.unmet_inputs;
    }
    for (const auto& out : task.outputs) {
      tr.output_bytes += w.data[idx.data_by_id.at(out)].size_bytes;
    }
  }

  // One notify entry per produced-consumed item occurrence, mirroring how
  // unmet_inputs was counted above.
  std::vector<std::vector<std::size_t>> notify(n);
  for (std::size_t d = 0; d < w.data.size(); ++d) {
    const auto p = idx.producer_of[d];
    if (p == WorkflowIndex::npos) continue;
    for (const auto c : idx.consumers_of[d]) notify[p].push_back(c);
  }

  std::mt19937_64 rng(cfg.seed);
  const auto jitter = [&]() -> double {
    if (cfg.submit_jitter_s <= 0.0) return 0.0;
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return u * cfg.submit_jitter_s;
  };

  ExecutionTrace trace;
  trace.workflow_name = w.name;
  trace.seed = cfg.seed;
  trace.profiles_hash = profiles_hash(states);

  std::priority_queue<Event, std::vector<Event>, EventAfter> events;
  std::uint64_t seq = 0;
  // CapacityFull waiters per executor, FIFO by (scheduled time, task id)
  std::map<std::string, std::set<std::pair<double, int>>> waiting;

  const auto push_submit = [&](std::size_t task, double t) {
    events.push({t, rank_of[task], runs[task].next_attempt_no, seq++, EventKind::submit, 0});
  };

  const auto schedule_cycle = [&](std::size_t task, double t) {
    TaskRun& tr = runs[task];
    tr.phase = Phase::pending;
    tr.throttle_events = 0;
    tr.cycle_scheduled_t = t;
    push_submit(task, t);
  };

  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t task = by_rank[r];
    if (runs[task].unmet_inputs == 0) schedule_cycle(task, jitter());
  }

  const auto fail_task = [&](std::size_t task, std::string reason) {
    runs[task].phase = Phase::failed;
    trace.failed_tasks.push_back({w.tasks[task].id, std::move(reason)});
  };

  while (!events.empty()) {
    const Event ev = events.top();
    events.pop();
    const double now = ev.t;

    if (ev.kind == EventKind::submit) {
      const std::size_t task = by_rank[static_cast<std::size_t>(ev.task_rank)];
      TaskRun& tr = runs[task];
      ExecutorState& state = *tr.state;
      const AdmitResult res = try_admit(state, now);

      if (res.admitted()) {
        const ExecutorProfile& profile = state.profile;
        const bool cold = res.outcome == AdmitResult::Outcome::admitted_cold;
        const double cold_s = cold ? sample_cold_start_s(profile, rng) : 0.0;
        const Allocation alloc = make_allocation(profile, w.tasks[task]);
        const double stage_in = staging_time_s(profile, tr.input_bytes);
        const double compute = compute_time_s(profile, w.tasks[task], alloc);
        const double stage_out = staging_time_s(profile, tr.output_bytes);

        // The lifetime cap covers the container's working span (staging and
        // compute), not the provisioning delay before it is live.
        const double live_t = now + cold_s;
        const double lifetime = stage_in + compute + stage_out;

        TaskAttempt attempt;
        attempt.task_id = w.tasks[task].id;
        attempt.group = w.tasks[task].group;
        attempt.attempt_no = tr.next_attempt_no;
        attempt.executor = tr.executor;
        attempt.scheduled_t = tr.cycle_scheduled_t;
        attempt.setup_start_t = now;
        attempt.cold = cold;
        attempt.allocation = alloc;
        attempt.throttle_events = tr.throttle_events;
        if (lifetime > profile.max_exec_s) {
          attempt.outcome = AttemptOutcome::timeout;
          attempt.end_t = live_t + profile.max_exec_s;
          attempt.exec_start_t = std::min(live_t + stage_in, attempt.end_t);
        } else {
          attempt.outcome = AttemptOutcome::success;
          attempt.end_t = live_t + lifetime;
          attempt.exec_start_t = live_t + stage_in;
        }
        attempt.setup_s = attempt.exec_start_t - attempt.scheduled_t;
        attempt.exec_s = attempt.end_t - attempt.exec_start_t;

        tr.phase = Phase::running;
        const std::size_t attempt_index = trace.attempts.size();
        trace.attempts.push_back(std::move(attempt));
        events.push({trace.attempts[attempt_index].end_t, ev.task_rank,
                     trace.attempts[attempt_index].attempt_no, seq++, EventKind::finish,
                     attempt_index});
      } else if (res.outcome == AdmitResult::Outcome::throttled) {
        ++tr.throttle_events;
        TaskAttempt probe;
        probe.outcome = AttemptOutcome::throttled_retry;
        probe.throttle_events = tr.throttle_events;
        const RetryDecision d = retry_decision(probe, cfg);
        const double delay = std::max(res.retry_after_s, d.delay_s);
        if (!std::isfinite(delay)) {
          // zero refill: the platform will never hand out another token
          fail_task(task, "throttled with no token refill (burst_refill_per_s = 0)");
        } else {
          push_submit(task, now + delay);
        }
      } else {  // capacity full: wait for a release
        waiting[tr.executor].insert({tr.cycle_scheduled_t, ev.task_rank});
      }
      continue;
    }

    // finish: the container lifecycle ends, successfully or by timeout
    const TaskAttempt& attempt = trace.attempts[ev.attempt_index];
    const std::size_t task = by_rank[static_cast<std::size_t>(ev.task_rank)];
    TaskRun& tr = runs[task];
    release(*tr.state, now);

    auto& queue = waiting[tr.executor];
    if (!queue.empty()) {
      const auto head = *queue.begin();
      queue.erase(queue.begin());
      const std::size_t woken = by_rank[static_cast<std::size_t>(head.second)];
      push_submit(woken, now);
    }

    if (attempt.outcome == AttemptOutcome::success) {
      tr.phase = Phase::done;
      for (const auto c : notify[task]) {
        if (--runs[c].unmet_inputs == 0 && runs[c].phase == Phase::blocked) {
          schedule_cycle(c, now + jitter());
        }
      }
    } else {
      ++tr.timeouts;
      const RetryDecision d = retry_decision(attempt, cfg);
      if (d.retry) {
        ++tr.next_attempt_no;
        tr.throttle_events = 0;
        tr.cycle_scheduled_t = now + d.delay_s;
        tr.phase = Phase::pending;
        push_submit(task, now + d.delay_s);
      } else {
        std::ostringstream os;
        os << "retry budget exhausted after " << tr.timeouts << " timeout(s) in "
           << tr.next_attempt_no << " attempt(s)";
        fail_task(task, os.str());
      }
    }
  }

  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t task = by_rank[r];
    if (runs[task].phase == Phase::blocked) {
      trace.failed_tasks.push_back({w.tasks[task].id, "never became ready: upstream task failed"});
    }
  }
  trace.complete = trace.failed_tasks.empty();

  double first_scheduled = std::numeric_limits<double>::infinity();
  double last_end = -std::numeric_limits<double>::infinity();
  for (const auto& a : trace.attempts) {
    if (a.outcome != AttemptOutcome::success) continue;
    first_scheduled = std::min(first_scheduled, a.scheduled_t);
    last_end = std::max(last_end, a.end_t);
  }
  trace.makespan_s = last_end >= first_scheduled ? last_end - first_scheduled : 0.0;

  for (const auto& [name, state] : states) trace.executor_counters[name] = state.counters;
  return trace;
}

std::string serialize_trace(const ExecutionTrace& trace) {
  std::ostringstream out;
  nlohmann::ordered_json header;
  header["workflow_name"] = trace.workflow_name;
  header["seed"] = trace.seed;
  header["profiles_hash"] = trace.profiles_hash;
  out << header.dump() << "\n";

  for (const auto& a : trace.attempts) {
    nlohmann::ordered_json j;
    j["task_id"] = a.task_id;
    j["group"] = a.group;
    j["attempt_no"] = a.attempt_no;
    j["executor"] = a.executor;
    j["scheduled_t"] = a.scheduled_t;
    j["setup_start_t"] = a.setup_start_t;
    j["exec_start_t"] = a.exec_start_t;
    j["end_t"] = a.end_t;
    j["setup_s"] = a.setup_s;
    j["exec_s"] = a.exec_s;
    j["outcome"] = to_string(a.outcome);
    j["cold"] = a.cold;
    j["memory_mb"] = a.allocation.memory_mb;
    j["vcpu"] = a.allocation.vcpu;
    j["throttle_events"] = a.throttle_events;
    out << j.dump() << "\n";
  }

  nlohmann::ordered_json trailer;
  trailer["makespan_s"] = trace.makespan_s;
  trailer["complete"] = trace.complete;
  trailer["failed_tasks"] = nlohmann::ordered_json::array();
  for (const auto& f : trace.failed_tasks) {
    nlohmann::ordered_json fj;
    fj["task_id"] = f.task_id;
    fj["reason"] = f.reason;
    trailer["failed_tasks"].push_back(std::move(fj));
  }
  trailer["executors"] = nlohmann::ordered_json::object();
  for (const auto& [name, counters] : trace.executor_counters) {
    trailer["executors"][name] = counters_to_json(counters);
  }
  out << trailer.dump() << "\n";
  return out.str();
}

ExecutionTrace deserialize_trace(const std::string& jsonl) {
  ExecutionTrace trace;
  std::istringstream in(jsonl);
  std::string line;
  bool saw_header = false, saw_trailer = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw EngineError(std::string("trace line is not valid JSON: ") + e.what());
    }
    if (!saw_header) {
      trace.workflow_name = j.at("workflow_name").get<std::string>();
      trace.seed = j.at("seed").get<std::uint64_t>();
      trace.profiles_hash = j.at("profiles_hash").get<std::string>();
      saw_header = true;
      continue;
    }
    if (j.contains("makespan_s")) {
      trace.makespan_s = j.at("makespan_s").get<double>();
      trace.complete = j.at("complete").get<bool>();
      for (const auto& fj : j.at("failed_tasks")) {
        trace.failed_tasks.push_back(
            {fj.at("task_id").get<std::string>(), fj.at("reason").get<std::string>()});
      }
      for (const auto& [name, cj] : j.at("executors").items()) {
        trace.executor_counters[name] = counters_from_json(cj);
      }
      saw_trailer = true;
      continue;
    }
    TaskAttempt a;
    a.task_id = j.at("task_id").get<std::string>();
    a.group = j.at("group").get<std::string>();
    a.attempt_no = j.at("attempt_no").get<int>();
    a.executor = j.at("executor").get<std::string>();
    a.scheduled_t = j.at("scheduled_t").get<double>();
    a.setup_start_t = j.at("setup_start_t").get<double>();
    a.exec_start_t = j.at("exec_start_t").get<double>();
    a.end_t = j.at("end_t").get<double>();
    a.setup_s = j.at("setup_s").get<double>();
    a.exec_s = j.at("exec_s").get<double>();
    a.outcome = outcome_from_string(j.at("outcome").get<std::string>());
    a.cold = j.at("cold").get<bool>();
    a.allocation.memory_mb = j.at("memory_mb").get<int>();
    a.allocation.vcpu = j.at("vcpu").get<double>();
    a.throttle_events = j.at("throttle_events").get<int>();
    trace.attempts.push_back(std::move(a));
  }
  if (!saw_header) throw EngineError("trace is empty: missing header line");
  if (!saw_trailer) throw EngineError("trace is truncated: missing trailer line");
  return trace;
}

}  // namespace flowsim
