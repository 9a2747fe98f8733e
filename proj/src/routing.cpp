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

#include "flowsim/routing.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flowsim/rational.hpp"

namespace flowsim {

namespace {

double estimated_duration_s(const ExecutorProfile& profile, const Task& task,
                            const RoutingPolicy& policy) {
  if (task.work_gcs == 0.0) return 0.0;
  const Allocation alloc = make_allocation(profile, task);
  const double usable = std::min(alloc.vcpu, static_cast<double>(task.parallelism));
  return task.work_gcs / (policy.estimate_clock_ghz * usable);
}

}  // namespace

std::string fit_failure(const ExecutorProfile& profile, const Task& task,
                        const RoutingPolicy& policy) {
  std::ostringstream os;
  if (task.memory_mb > profile.memory_mb_max) {
    os << "memory " << task.memory_mb << " MB > max " << profile.memory_mb_max << " MB";
    return os.str();
  }
  const int alloc_memory = std::clamp(task.memory_mb, profile.memory_mb_min, profile.memory_mb_max);
  const int disk_quota = effective_disk_quota_mb(profile, alloc_memory);
  if (task.disk_mb > disk_quota) {
    os << "disk " << task.disk_mb << " MB > quota " << disk_quota << " MB";
    return os.str();
  }
  if (!profile.unbounded_exec()) {
    const double est = estimated_duration_s(profile, task, policy);
    const double budget = profile.max_exec_s * policy.duration_safety_factor;
    if (est > budget) {
      os << "estimated duration " << format_double(est) << " s > " << format_double(budget)
         << " s (" << format_double(profile.max_exec_s) << " s limit x "
         << format_double(policy.duration_safety_factor) << " safety)";
      return os.str();
    }
  }
  return {};
}

bool fits(const ExecutorProfile& profile, const Task& task, const RoutingPolicy& policy) {
  return fit_failure(profile, task, policy).empty();
}

std::string route(const RoutingPolicy& policy, const Task& task,
                  const std::map<std::string, ExecutorProfile>& profiles) {
  const auto profile_named = [&](const std::string& name) -> const ExecutorProfile& {
    const auto it = profiles.find(name);
    if (it == profiles.end()) throw RoutingError("policy references unknown executor: " + name);
    return it->second;
  };

  if (task.executor_hint && fits(profile_named(*task.executor_hint), task, policy)) {
    return *task.executor_hint;
  }
  const auto ov = policy.group_overrides.find(task.group);
  if (ov != policy.group_overrides.end() && fits(profile_named(ov->second), task, policy)) {
    return ov->second;
  }
  for (const auto& name : policy.preference) {
    if (fits(profile_named(name), task, policy)) return name;
  }

  std::ostringstream os;
  os << "no executor fits task " << task.id << ":";
  for (const auto& name : policy.preference) {
    os << " [" << name << ": " << fit_failure(profile_named(name), task, policy) << "]";
  }
  throw RoutingError(os.str());
}

RoutingPolicy load_policy(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("policy config syntax error: ") + e.what());
  }
  RoutingPolicy p;
  if (!j.contains("preference") || !j.at("preference").is_array() || j.at("preference").empty()) {
    throw ConfigError("policy config requires a non-empty 'preference' array");
  }
  p.preference = j.at("preference").get<std::vector<std::string>>();
  if (j.contains("group_overrides")) {
    for (const auto& [group, name] : j.at("group_overrides").items()) {
      p.group_overrides[group] = name.get<std::string>();
    }
  }
  p.duration_safety_factor = j.value("duration_safety_factor", 0.8);
  p.estimate_clock_ghz = j.value("estimate_clock_ghz", 2.9);
  if (!(p.duration_safety_factor > 0.0) || p.duration_safety_factor > 1.0) {
    throw ConfigError("duration_safety_factor must be in (0, 1]");
  }
  if (!(p.estimate_clock_ghz > 0.0)) throw ConfigError("estimate_clock_ghz must be positive");
  return p;
}

std::string serialize_policy(const RoutingPolicy& p) {
  nlohmann::ordered_json j;
  j["preference"] = p.preference;
  j["group_overrides"] = nlohmann::ordered_json::object();
  for (const auto& [group, name] : p.group_overrides) j["group_overrides"][group] = name;
  j["duration_safety_factor"] = p.duration_safety_factor;
  j["estimate_clock_ghz"] = p.estimate_clock_ghz;
  return j.dump(2) + "\n";
}

}  // namespace flowsim
