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

#include "flowsim/workflow.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include <nlohmann/json.hpp>

namespace flowsim {

using ordered_json = nlohmann::ordered_json;

WorkflowIndex::WorkflowIndex(const Workflow& w) {
  for (std::size_t i = 0; i < w.tasks.size(); ++i) task_by_id.emplace(w.tasks[i].id, i);
  for (std::size_t i = 0; i < w.data.size(); ++i) data_by_id.emplace(w.data[i].id, i);
  producer_of.assign(w.data.size(), npos);
  consumers_of.assign(w.data.size(), {});
  for (std::size_t t = 0; t < w.tasks.size(); ++t) {
    for (const auto& out : w.tasks[t].outputs) {
      auto it = data_by_id.find(out);
      if (it != data_by_id.end()) producer_of[it->second] = t;
    }
    for (const auto& in : w.tasks[t].inputs) {
      auto it = data_by_id.find(in);
      if (it != data_by_id.end()) consumers_of[it->second].push_back(t);
    }
  }
}

namespace {

const nlohmann::json& require_field(const nlohmann::json& obj, const char* key,
                                    const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw WorkflowError("missing required field '" + std::string(key) + "' in " + where);
  }
  return *it;
}

template <typename T>
T field_as(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto& v = require_field(obj, key, where);
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw WorkflowError("wrong type for field '" + std::string(key) + "' in " + where);
  }
}

}  // namespace

Workflow parse_workflow(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw WorkflowError(std::string("workflow JSON syntax error: ") + e.what());
  }
  if (!j.is_object()) throw WorkflowError("workflow document must be a JSON object");

  Workflow w;
  w.name = field_as<std::string>(j, "name", "workflow");

  for (const auto& dj : require_field(j, "data", "workflow")) {
    const std::string where = "data item";
    DataItem d;
    d.id = field_as<std::string>(dj, "id", where);
    d.name = field_as<std::string>(dj, "name", where);
    const auto size = field_as<std::int64_t>(dj, "size_bytes", where);
    if (size < 0) throw WorkflowError("size_bytes must be non-negative for data '" + d.id + "'");
    d.size_bytes = static_cast<std::uint64_t>(size);
    w.data.push_back(std::move(d));
  }

  for (const auto& tj : require_field(j, "tasks", "workflow")) {
    const std::string where = "task";
    Task t;
    t.id = field_as<std::string>(tj, "id", where);
    t.name = field_as<std::string>(tj, "name", where);
    t.group = field_as<std::string>(tj, "group", where);
    t.work_gcs = field_as<double>(tj, "work_gcs", where);
    t.parallelism = field_as<int>(tj, "parallelism", where);
    t.memory_mb = field_as<int>(tj, "memory_mb", where);
    t.disk_mb = field_as<int>(tj, "disk_mb", where);
    t.inputs = field_as<std::vector<std::string>>(tj, "inputs", where);
    t.outputs = field_as<std::vector<std::string>>(tj, "outputs", where);
    if (tj.contains("executor_hint")) {
      t.executor_hint = field_as<std::string>(tj, "executor_hint", where);
    }
    if (t.work_gcs < 0) throw WorkflowError("work_gcs must be non-negative for task '" + t.id + "'");
    if (t.parallelism < 1) throw WorkflowError("parallelism must be >= 1 for task '" + t.id + "'");
    if (t.memory_mb < 1) throw WorkflowError("memory_mb must be positive for task '" + t.id + "'");
    if (t.disk_mb < 0) throw WorkflowError("disk_mb must be non-negative for task '" + t.id + "'");
    w.tasks.push_back(std::move(t));
  }
  return w;
}

std::string serialize_workflow(const Workflow& w) {
  ordered_json j;
  j["name"] = w.name;
  j["data"] = ordered_json::array();
  for (const auto& d : w.data) {
    ordered_json dj;
    dj["id"] = d.id;
    dj["name"] = d.name;
    dj["size_bytes"] = d.size_bytes;
    j["data"].push_back(std::move(dj));
  }
  j["tasks"] = ordered_json::array();
  for (const auto& t : w.tasks) {
    ordered_json tj;
    tj["id"] = t.id;
    tj["name"] = t.name;
    tj["group"] = t.group;
    tj["work_gcs"] = t.work_gcs;
    tj["parallelism"] = t.parallelism;
    tj["memory_mb"] = t.memory_mb;
    tj["disk_mb"] = t.disk_mb;
    tj["inputs"] = t.inputs;
    tj["outputs"] = t.outputs;
    if (t.executor_hint) tj["executor_hint"] = *t.executor_hint;
    j["tasks"].push_back(std::move(tj));
  }
  return j.dump(2) + "\n";
}

namespace {

// Direct dependency edges task->task induced by produced/consumed items.
std::vector<std::vector<std::size_t>> dependency_successors(const Workflow& w,
                                                            const WorkflowIndex& idx) {
  std::vector<std::vector<std::size_t>> succ(w.tasks.size());
  for (std::size_t d = 0; d < w.data.size(); ++d) {
    const auto p = idx.producer_of[d];
    if (p == WorkflowIndex::npos) continue;
    for (const auto c : idx.consumers_of[d]) {
      if (c != p) succ[p].push_back(c);
    }
  }
  for (auto& s : succ) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return succ;
}

// One cycle as "a -> b -> ... -> a". Every node Kahn elimination could not
// remove has an in-region predecessor, so walking predecessors from any of
// them must revisit a node within n steps.
std::string witness_cycle(const Workflow& w, const std::vector<std::vector<std::size_t>>& succ,
                          const std::vector<bool>& in_cycle_region, std::size_t start) {
  std::vector<std::size_t> pred(w.tasks.size(), WorkflowIndex::npos);
  for (std::size_t u = 0; u < succ.size(); ++u) {
    if (!in_cycle_region[u]) continue;
    for (const auto v : succ[u]) {
      if (in_cycle_region[v]) pred[v] = u;
    }
  }

  std::vector<std::size_t> walk;
  std::vector<std::size_t> pos_in_walk(w.tasks.size(), WorkflowIndex::npos);
  std::size_t cur = start;
  while (pos_in_walk[cur] == WorkflowIndex::npos) {
    pos_in_walk[cur] = walk.size();
    walk.push_back(cur);
    cur = pred[cur];
  }
  // walk[pos_in_walk[cur]..] is the cycle, recorded against edge direction
  std::vector<std::size_t> cycle(walk.begin() + static_cast<std::ptrdiff_t>(pos_in_walk[cur]),
                                 walk.end());
  std::reverse(cycle.begin(), cycle.end());
  std::ostringstream os;
  for (const auto n : cycle) os << w.tasks[n].id << " -> ";
  os << w.tasks[cycle.front()].id;
  return os.str();
}

}  // namespace

std::vector<ValidationIssue> validate_workflow(const Workflow& w) {
  std::vector<ValidationIssue> report;
  const auto add = [&report](ValidationIssue::Code code, std::string msg) {
    report.push_back({code, std::move(msg)});
  };

  std::map<std::string, int> task_ids, data_ids;
  for (const auto& t : w.tasks) ++task_ids[t.id];
  for (const auto& d : w.data) ++data_ids[d.id];
  for (const auto& [id, n] : task_ids) {
    if (n > 1) add(ValidationIssue::Code::duplicate_task_id, "duplicate task id: " + id);
  }
  for (const auto& [id, n] : data_ids) {
    if (n > 1) add(ValidationIssue::Code::duplicate_data_id, "duplicate data id: " + id);
  }

  std::map<std::string, std::vector<std::string>> producers;  // data id -> task ids
  for (const auto& t : w.tasks) {
    for (const auto& in : t.inputs) {
      if (!data_ids.count(in)) {
        add(ValidationIssue::Code::dangling_reference,
            "task " + t.id + " consumes unknown data item: " + in);
      }
    }
    for (const auto& out : t.outputs) {
      if (!data_ids.count(out)) {
        add(ValidationIssue::Code::dangling_reference,
            "task " + t.id + " produces unknown data item: " + out);
      } else {
        producers[out].push_back(t.id);
      }
    }
    for (const auto& in : t.inputs) {
      if (std::find(t.outputs.begin(), t.outputs.end(), in) != t.outputs.end()) {
        add(ValidationIssue::Code::input_is_output,
            "task " + t.id + " lists data item both as input and output: " + in);
      }
    }
  }
  for (const auto& [data_id, who] : producers) {
    if (who.size() > 1) {
      add(ValidationIssue::Code::multiple_producers, "multiple producers: " + data_id);
    }
  }

  // Cycle check only makes sense once the reference structure is sound.
  if (report.empty()) {
    const WorkflowIndex idx(w);
    const auto succ = dependency_successors(w, idx);
    std::vector<int> indegree(w.tasks.size(), 0);
    for (const auto& s : succ) {
      for (const auto v : s) ++indegree[v];
    }
    std::deque<std::size_t> q;
    for (std::size_t i = 0; i < w.tasks.size(); ++i) {
      if (indegree[i] == 0) q.push_back(i);
    }
    std::size_t removed = 0;
    while (!q.empty()) {
      const auto u = q.front();
      q.pop_front();
      ++removed;
      for (const auto v : succ[u]) {
        if (--indegree[v] == 0) q.push_back(v);
      }
    }
    if (removed != w.tasks.size()) {
      std::vector<bool> in_cycle_region(w.tasks.size(), false);
      std::size_t first = WorkflowIndex::npos;
      for (std::size_t i = 0; i < w.tasks.size(); ++i) {
        if (indegree[i] > 0) {
          in_cycle_region[i] = true;
          if (first == WorkflowIndex::npos) first = i;
        }
      }
      add(ValidationIssue::Code::cycle, "cycle: " + witness_cycle(w, succ, in_cycle_region, first));
    }
  }
  return report;
}

std::vector<std::string> ready_tasks(const Workflow& w, const std::set<std::string>& completed) {
  const WorkflowIndex idx(w);
  for (const auto& id : completed) {
    if (!idx.task_by_id.count(id)) {
      throw WorkflowError("unknown task id in completed set: " + id);
    }
  }
  std::vector<std::string> ready;
  for (const auto& t : w.tasks) {
    if (completed.count(t.id)) continue;
    bool ok = true;
    for (const auto& in : t.inputs) {
      const auto it = idx.data_by_id.find(in);
      if (it == idx.data_by_id.end()) {
        ok = false;  // dangling reference can never be satisfied
        break;
      }
      const auto producer = idx.producer_of[it->second];
      if (producer == WorkflowIndex::npos) continue;  // workflow input
      if (!completed.count(w.tasks[producer].id)) {
        ok = false;
        break;
      }
    }
    if (ok) ready.push_back(t.id);
  }
  std::sort(ready.begin(), ready.end());
  return ready;
}

namespace {

std::string padded_id(const char* prefix, int n, int width) {
  std::string digits = std::to_string(n);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return std::string(prefix) + digits;
}

int id_width(int count) {
  int width = 1, p = 10;
  while (count >= p && width < 18) {
    ++width;
    p *= 10;
  }
  return std::max(width, 4);
}

Task task_from_template(const TaskTemplate& tmpl, std::string id, std::string group) {
  Task t;
  t.id = id;
  t.name = std::move(id);
  t.group = std::move(group);
  t.work_gcs = tmpl.work_gcs;
  t.parallelism = tmpl.parallelism;
  t.memory_mb = tmpl.memory_mb;
  t.disk_mb = tmpl.disk_mb;
  t.executor_hint = tmpl.executor_hint;
  return t;
}

}  // namespace

Workflow generate_bag(int n, const TaskTemplate& tmpl) {
  if (n < 1) throw WorkflowError("generate_bag: n must be >= 1");
  const int width = id_width(n);

  Workflow w;
  w.name = "bag-" + std::to_string(n);
  w.data.push_back({"d-in", "shared-input", tmpl.input_bytes});
  for (int i = 1; i <= n; ++i) {
    Task t = task_from_template(tmpl, padded_id("t", i, width), tmpl.group);
    t.inputs = {"d-in"};
    const std::string out = padded_id("d-out-", i, width);
    w.data.push_back({out, out, tmpl.output_bytes});
    t.outputs = {out};
    w.tasks.push_back(std::move(t));
  }
  return w;
}

Workflow generate_fan(int width, const TaskTemplate& tmpl) {
  if (width < 1) throw WorkflowError("generate_fan: width must be >= 1");
  const int pad = id_width(width + 2);

  Workflow w;
  w.name = "fan-" + std::to_string(width);
  w.data.push_back({"d-in", "workflow-input", tmpl.input_bytes});

  Task setup = task_from_template(tmpl, padded_id("t", 1, pad), "setup");
  setup.inputs = {"d-in"};
  w.data.push_back({"d-setup", "d-setup", tmpl.output_bytes});
  setup.outputs = {"d-setup"};
  w.tasks.push_back(std::move(setup));

  std::vector<std::string> middle_outputs;
  for (int i = 0; i < width; ++i) {
    Task t = task_from_template(tmpl, padded_id("t", i + 2, pad), tmpl.group);
    t.inputs = {"d-setup"};
    const std::string out = padded_id("d-mid-", i + 1, pad);
    w.data.push_back({out, out, tmpl.output_bytes});
    t.outputs = {out};
    middle_outputs.push_back(out);
    w.tasks.push_back(std::move(t));
  }

  Task agg = task_from_template(tmpl, padded_id("t", width + 2, pad), "aggregate");
  agg.inputs = middle_outputs;
  w.data.push_back({"d-result", "d-result", tmpl.output_bytes});
  agg.outputs = {"d-result"};
  w.tasks.push_back(std::move(agg));
  return w;
}

Workflow generate_pipeline(const std::vector<StageSpec>& stages, StagePattern pattern) {
  if (stages.empty()) throw WorkflowError("generate_pipeline: stage list must not be empty");
  int total = 0;
  for (const auto& s : stages) {
    if (s.width < 1) throw WorkflowError("generate_pipeline: stage width must be >= 1");
    total += s.width;
  }
  const int pad = id_width(total);

  Workflow w;
  w.name = "pipeline-" + std::to_string(stages.size());
  w.data.push_back({"d-in", "workflow-input", stages.front().tmpl.input_bytes});

  int counter = 0;
  std::vector<std::string> prev_outputs;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const auto& stage = stages[s];
    const bool matched = pattern == StagePattern::matched && !prev_outputs.empty() &&
                         static_cast<int>(prev_outputs.size()) == stage.width;
    std::vector<std::string> outputs;
    for (int i = 0; i < stage.width; ++i) {
      Task t = task_from_template(stage.tmpl, padded_id("t", ++counter, pad), stage.group);
      if (prev_outputs.empty()) {
        t.inputs = {"d-in"};
      } else if (matched) {
        t.inputs = {prev_outputs[static_cast<std::size_t>(i)]};
      } else {
        t.inputs = prev_outputs;
      }
      const std::string out = padded_id("d-", counter, pad);
      w.data.push_back({out, out, stage.tmpl.output_bytes});
      t.outputs = {out};
      outputs.push_back(out);
      w.tasks.push_back(std::move(t));
    }
    prev_outputs = std::move(outputs);
  }
  return w;
}

}  // namespace flowsim
