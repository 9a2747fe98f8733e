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
#include <vector>

#include "flowsim/executors.hpp"

namespace flowsim {

struct BurstBenchResult {
  std::vector<std::int64_t> bursts;       // one per repeat
  std::vector<std::int64_t> cold_starts;  // one per repeat
};

/// Submits `n` instantaneous tasks to one executor, `repeats` times in a row
/// against the same state (warm pools persist between repeats), and measures
/// the admission burst of each run. Deterministic for a fixed seed.
BurstBenchResult burst_bench(const ExecutorProfile& profile, int n, int repeats,
                             std::uint64_t seed, double work_gcs = 0.0);

/// CSV with header repeat,burst.
std::string burst_bench_csv(const BurstBenchResult& result);

}  // namespace flowsim
