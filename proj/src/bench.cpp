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

#include "flowsim/bench.hpp"

#include <sstream>

#include "flowsim/engine.hpp"
#include "flowsim/metrics.hpp"

namespace flowsim {

BurstBenchResult burst_bench(const ExecutorProfile& profile, int n, int repeats,
                             std::uint64_t seed, double work_gcs) {
  if (n < 1) throw std::invalid_argument("burst_bench: n must be >= 1");
  if (repeats < 1) throw std::invalid_argument("burst_bench: repeats must be >= 1");

  TaskTemplate tmpl;
  tmpl.group = "burst";
  tmpl.work_gcs = work_gcs;
  tmpl.parallelism = 1;
  tmpl.memory_mb = profile.memory_mb_min;
  tmpl.disk_mb = 0;
  tmpl.input_bytes = 0;
  tmpl.output_bytes = 0;
  const Workflow w = generate_bag(n, tmpl);

  RoutingPolicy policy;
  policy.preference = {profile.name};
  policy.estimate_clock_ghz = profile.clock_ghz;

  // One state for all repeats: the warm pool carries across runs.
  std::map<std::string, ExecutorState> states;
  states.emplace(profile.name, ExecutorState(profile));

  BurstBenchResult result;
  for (int r = 0; r < repeats; ++r) {
    EngineConfig cfg;
    cfg.seed = seed + static_cast<std::uint64_t>(r);
    const ExecutionTrace trace = run(w, policy, states, cfg);
    result.bursts.push_back(measure_burst(trace, profile.name));
    result.cold_starts.push_back(trace.executor_counters.at(profile.name).cold_starts);
  }
  return result;
}

std::string burst_bench_csv(const BurstBenchResult& result) {
  std::ostringstream out;
  out << "repeat,burst\n";
  for (std::size_t i = 0; i < result.bursts.size(); ++i) {
    out << i << ',' << result.bursts[i] << "\n";
  }
  return out.str();
}

}  // namespace flowsim
