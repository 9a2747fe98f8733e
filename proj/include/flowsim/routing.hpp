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

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowsim/executors.hpp"

namespace flowsim {

struct RoutingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Hybrid task placement: explicit per-group overrides for the hand-picked
/// cases, a fit predicate over limits for everything else.
struct RoutingPolicy {
  std::vector<std::string> preference;               // executor names, in order
  std::map<std::string, std::string> group_overrides;  // task group -> executor name
  double duration_safety_factor = 0.8;  // margin against estimate error, in (0,1]
  double estimate_clock_ghz = 2.9;      // reference clock for duration estimates
};

/// True iff the task fits the profile's memory, disk, and (for bounded
/// profiles) estimated-duration limits. The estimate uses the policy's
/// reference clock, discounted by the safety factor.
bool fits(const ExecutorProfile& profile, const Task& task, const RoutingPolicy& policy);

/// Picks the executor for a task: a fitting executor_hint wins, then a
/// fitting group override, then the first fitting profile in preference
/// order. Throws RoutingError listing the failing constraint per profile
/// when nothing fits.
std::string route(const RoutingPolicy& policy, const Task& task,
                  const std::map<std::string, ExecutorProfile>& profiles);

/// Explains why a task does not fit a profile; empty when it fits.
std::string fit_failure(const ExecutorProfile& profile, const Task& task,
                        const RoutingPolicy& policy);

RoutingPolicy load_policy(const std::string& json_text);
std::string serialize_policy(const RoutingPolicy& policy);

}  // namespace flowsim
