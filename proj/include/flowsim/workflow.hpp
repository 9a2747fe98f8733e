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
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace flowsim {

struct WorkflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A workflow is a DAG of tasks whose edges are the data items they exchange:
// task A precedes task B iff some item produced by A is consumed by B. Items
// nobody produces are workflow inputs.

struct DataItem {
  std::string id;
  std::string name;
  std::uint64_t size_bytes = 0;
};

struct Task {
  std::string id;
  std::string name;
  std::string group;
  double work_gcs = 0.0;  // compute demand in GHz-seconds
  int parallelism = 1;    // max cores the task can exploit
  int memory_mb = 128;
  int disk_mb = 0;
  std::vector<std::string> inputs;   // DataItem ids
  std::vector<std::string> outputs;  // DataItem ids
  std::optional<std::string> executor_hint;
};

struct Workflow {
  std::string name;
  std::vector<Task> tasks;
  std::vector<DataItem> data;
};

/// Lookup structures derived from a structurally valid workflow.
struct WorkflowIndex {
  std::map<std::string, std::size_t> task_by_id;
  std::map<std::string, std::size_t> data_by_id;
  // producer_of[data idx] = task idx, or npos for workflow inputs
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> producer_of;
  std::vector<std::vector<std::size_t>> consumers_of;  // data idx -> task idxs

  explicit WorkflowIndex(const Workflow& w);
};

struct ValidationIssue {
  enum class Code {
    duplicate_task_id,
    duplicate_data_id,
    dangling_reference,
    input_is_output,
    multiple_producers,
    cycle,
  };
  Code code;
  std::string message;
};

Workflow parse_workflow(const std::string& json_text);
std::string serialize_workflow(const Workflow& w);

/// Returns every structural violation found; an empty report means valid.
std::vector<ValidationIssue> validate_workflow(const Workflow& w);

/// Tasks not yet completed whose inputs are all available (workflow inputs or
/// outputs of completed tasks), sorted by task id. Throws on unknown ids in
/// `completed`.
std::vector<std::string> ready_tasks(const Workflow& w, const std::set<std::string>& completed);

/// Field defaults used by the generators.
struct TaskTemplate {
  std::string group = "kinc";
  double work_gcs = 290.0;
  int parallelism = 1;
  int memory_mb = 2048;
  int disk_mb = 0;
  std::uint64_t input_bytes = 1'000'000;
  std::uint64_t output_bytes = 100'000;
  std::optional<std::string> executor_hint;
};

/// n independent tasks in one group, all consuming one shared input item.
Workflow generate_bag(int n, const TaskTemplate& tmpl = {});

/// setup -> width parallel tasks in the dominating group -> aggregate.
Workflow generate_fan(int width, const TaskTemplate& tmpl = {});

enum class StagePattern {
  all_to_all,  // every task in stage i+1 consumes every stage-i output
  matched,     // 1-to-1 when consecutive widths are equal, else all-to-all
};

struct StageSpec {
  std::string group;
  int width = 1;
  TaskTemplate tmpl;
};

Workflow generate_pipeline(const std::vector<StageSpec>& stages,
                           StagePattern pattern = StagePattern::all_to_all);

}  // namespace flowsim
