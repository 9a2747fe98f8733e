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

#include <doctest.h>

#include <algorithm>
#include <random>

#include "flowsim/workflow.hpp"
#include "oracles.hpp"

using namespace flowsim;

namespace {

bool structurally_equal(const Workflow& a, const Workflow& b) {
  if (a.name != b.name || a.tasks.size() != b.tasks.size() || a.data.size() != b.data.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const auto& x = a.data[i];
    const auto& y = b.data[i];
    if (x.id != y.id || x.name != y.name || x.size_bytes != y.size_bytes) return false;
  }
  for (std::size_t i = 0; i < a.tasks.size(); ++i) {
    const auto& x = a.tasks[i];
    const auto& y = b.tasks[i];
    if (x.id != y.id || x.name != y.name || x.group != y.group || x.work_gcs != y.work_gcs ||
        x.parallelism != y.parallelism || x.memory_mb != y.memory_mb || x.disk_mb != y.disk_mb ||
        x.inputs != y.inputs || x.outputs != y.outputs || x.executor_hint != y.executor_hint) {
      return false;
    }
  }
  return true;
}

// Dependency edges over task positions sorted by id, for shape comparison
// across workflows with different id schemes.
std::set<std::pair<int, int>> shape_edges(const Workflow& w) {
  std::vector<std::string> ids;
  for (const auto& t : w.tasks) ids.push_back(t.id);
  std::sort(ids.begin(), ids.end());
  const auto pos = [&](const std::string& id) {
    return static_cast<int>(std::find(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::set<std::pair<int, int>> edges;
  for (const auto& [a, b] : oracle::direct_edges(w)) edges.emplace(pos(a), pos(b));
  return edges;
}

}  // namespace

TEST_CASE("parse minimal workflow document") {
  const Workflow w = parse_workflow(R"({
    "name": "mini",
    "data": [],
    "tasks": [{"id": "t1", "name": "t1", "group": "g", "work_gcs": 1.0,
               "parallelism": 1, "memory_mb": 128, "disk_mb": 0,
               "inputs": [], "outputs": []}]
  })");
  CHECK(w.name == "mini");
  CHECK(w.tasks.size() == 1);
  CHECK(w.data.empty());
  CHECK_FALSE(w.tasks[0].executor_hint.has_value());
}

TEST_CASE("parse derives dependency from shared data item") {
  const Workflow w = parse_workflow(R"({
    "name": "chain",
    "data": [{"id": "d1", "name": "d1", "size_bytes": 10}],
    "tasks": [
      {"id": "A", "name": "A", "group": "g", "work_gcs": 1, "parallelism": 1,
       "memory_mb": 128, "disk_mb": 0, "inputs": [], "outputs": ["d1"]},
      {"id": "B", "name": "B", "group": "g", "work_gcs": 1, "parallelism": 1,
       "memory_mb": 128, "disk_mb": 0, "inputs": ["d1"], "outputs": []}
    ]
  })");
  const auto edges = oracle::direct_edges(w);
  CHECK(edges.count({"A", "B"}) == 1);
  CHECK(edges.size() == 1);
}

TEST_CASE("parse ignores unknown fields and keeps executor_hint") {
  const Workflow w = parse_workflow(R"({
    "name": "x", "comment": "ignored",
    "data": [],
    "tasks": [{"id": "t", "name": "t", "group": "g", "work_gcs": 0,
               "parallelism": 1, "memory_mb": 128, "disk_mb": 0,
               "inputs": [], "outputs": [], "executor_hint": "lambda-like",
               "extra": 42}]
  })");
  CHECK(w.tasks[0].executor_hint == "lambda-like");
}

TEST_CASE("parse error reporting") {
  CHECK_THROWS_WITH_AS(parse_workflow("{ nope"), doctest::Contains("syntax error"),
                       WorkflowError);
  CHECK_THROWS_WITH_AS(parse_workflow(R"({"name": "x", "tasks": []})"),
                       doctest::Contains("missing required field 'data'"), WorkflowError);
  CHECK_THROWS_WITH_AS(parse_workflow(R"({
    "name": "x", "data": [],
    "tasks": [{"id": "t", "name": "t", "group": "g", "work_gcs": "lots",
               "parallelism": 1, "memory_mb": 128, "disk_mb": 0,
               "inputs": [], "outputs": []}]
  })"),
                       doctest::Contains("wrong type for field 'work_gcs'"), WorkflowError);
}

TEST_CASE("kinc-shaped document parses back with one group") {
  const Workflow generated = generate_bag(100);
  const Workflow w = parse_workflow(serialize_workflow(generated));
  CHECK(w.tasks.size() == 100);
  CHECK(std::all_of(w.tasks.begin(), w.tasks.end(),
                    [](const Task& t) { return t.group == "kinc"; }));
}

TEST_CASE("validate: clean two-task chain") {
  Workflow w;
  w.name = "chain";
  w.data = {{"d1", "d1", 0}};
  w.tasks = {{"A", "A", "g", 0, 1, 128, 0, {}, {"d1"}, {}},
             {"B", "B", "g", 0, 1, 128, 0, {"d1"}, {}, {}}};
  CHECK(validate_workflow(w).empty());
}

TEST_CASE("validate: two-task cycle gets one witness") {
  Workflow w;
  w.name = "cyc";
  w.data = {{"d1", "d1", 0}, {"d2", "d2", 0}};
  w.tasks = {{"A", "A", "g", 0, 1, 128, 0, {"d1"}, {"d2"}, {}},
             {"B", "B", "g", 0, 1, 128, 0, {"d2"}, {"d1"}, {}}};
  const auto report = validate_workflow(w);
  REQUIRE(report.size() == 1);
  CHECK(report[0].code == ValidationIssue::Code::cycle);
  CHECK(report[0].message.find("A") != std::string::npos);
  CHECK(report[0].message.find("B") != std::string::npos);
}

TEST_CASE("validate: multiple producers") {
  Workflow w;
  w.name = "mp";
  w.data = {{"d1", "d1", 0}};
  w.tasks = {{"A", "A", "g", 0, 1, 128, 0, {}, {"d1"}, {}},
             {"B", "B", "g", 0, 1, 128, 0, {}, {"d1"}, {}}};
  const auto report = validate_workflow(w);
  REQUIRE(report.size() == 1);
  CHECK(report[0].message == "multiple producers: d1");
}

TEST_CASE("validate: duplicate ids, dangling refs, input==output") {
  Workflow w;
  w.name = "bad";
  w.data = {{"d1", "d1", 0}};
  w.tasks = {{"A", "A", "g", 0, 1, 128, 0, {"ghost"}, {"d1"}, {}},
             {"A", "A2", "g", 0, 1, 128, 0, {"d1"}, {"d1"}, {}}};
  const auto report = validate_workflow(w);
  std::set<ValidationIssue::Code> codes;
  for (const auto& issue : report) codes.insert(issue.code);
  CHECK(codes.count(ValidationIssue::Code::duplicate_task_id));
  CHECK(codes.count(ValidationIssue::Code::dangling_reference));
  CHECK(codes.count(ValidationIssue::Code::input_is_output));
}

TEST_CASE("ready_tasks basics") {
  const Workflow fan = generate_fan(4);
  const auto first = ready_tasks(fan, {});
  REQUIRE(first.size() == 1);
  CHECK(first[0] == fan.tasks.front().id);

  std::set<std::string> all;
  for (const auto& t : fan.tasks) all.insert(t.id);
  CHECK(ready_tasks(fan, all).empty());

  CHECK_THROWS_AS(ready_tasks(fan, {"nope"}), WorkflowError);
}

TEST_CASE("ready_tasks on the diamond matches the brute-force definition") {
  // A -> {B, C} -> D, expected ready({A}) = [B, C] per the dependency closure
  Workflow w;
  w.name = "diamond";
  w.data = {{"da", "da", 0}, {"db", "db", 0}, {"dc", "dc", 0}};
  w.tasks = {{"A", "A", "g", 0, 1, 128, 0, {}, {"da"}, {}},
             {"B", "B", "g", 0, 1, 128, 0, {"da"}, {"db"}, {}},
             {"C", "C", "g", 0, 1, 128, 0, {"da"}, {"dc"}, {}},
             {"D", "D", "g", 0, 1, 128, 0, {"db", "dc"}, {}, {}}};
  REQUIRE(validate_workflow(w).empty());
  const auto expected = oracle::ready_by_definition(w, {"A"});
  CHECK(expected == std::vector<std::string>{"B", "C"});
  CHECK(ready_tasks(w, {"A"}) == expected);
  CHECK(ready_tasks(w, {"A", "B"}) == oracle::ready_by_definition(w, {"A", "B"}));
}

TEST_CASE("generate_bag") {
  CHECK_THROWS_AS(generate_bag(0), WorkflowError);

  const Workflow one = generate_bag(1);
  CHECK(ready_tasks(one, {}).size() == 1);

  const Workflow bag = generate_bag(200);
  CHECK(bag.tasks.size() == 200);
  CHECK(oracle::direct_edges(bag).empty());  // pairwise independent
  CHECK(bag.tasks.front().id == "t0001");

  CHECK(validate_workflow(generate_bag(1000)).empty());
}

TEST_CASE("generate_fan") {
  CHECK_THROWS_AS(generate_fan(0), WorkflowError);

  const Workflow chain = generate_fan(1);
  CHECK(chain.tasks.size() == 3);
  CHECK(oracle::direct_edges(chain).size() == 2);

  const Workflow fan = generate_fan(5);
  CHECK(fan.tasks.size() == 7);
  // the aggregate becomes ready only once all five middle tasks completed
  std::set<std::string> done{fan.tasks.front().id};
  for (int i = 1; i <= 4; ++i) done.insert(fan.tasks[static_cast<std::size_t>(i)].id);
  CHECK(oracle::ready_by_definition(fan, done) ==
        std::vector<std::string>{fan.tasks[5].id});  // last middle task only
  CHECK(ready_tasks(fan, done) == oracle::ready_by_definition(fan, done));
  done.insert(fan.tasks[5].id);
  CHECK(ready_tasks(fan, done) == std::vector<std::string>{fan.tasks.back().id});

  TaskTemplate tmpl;
  tmpl.group = "ellipsoids-openmp";
  const Workflow wide = generate_fan(50, tmpl);
  CHECK(std::count_if(wide.tasks.begin(), wide.tasks.end(),
                      [](const Task& t) { return t.group == "ellipsoids-openmp"; }) == 50);
}

TEST_CASE("generate_pipeline") {
  CHECK_THROWS_AS(generate_pipeline({}), WorkflowError);

  const Workflow single = generate_pipeline({{"solo", 1, {}}});
  CHECK(single.tasks.size() == 1);

  // (a,1),(b,4),(c,1) has the same shape as a fan of width 4
  const Workflow pipe = generate_pipeline({{"a", 1, {}}, {"b", 4, {}}, {"c", 1, {}}});
  CHECK(shape_edges(pipe) == shape_edges(generate_fan(4)));

  const std::vector<std::string> groups{"software-wrapper", "sort_sam", "dedup", "add_replace",
                                        "haplotype_caller"};
  std::vector<StageSpec> stages;
  for (const auto& g : groups) stages.push_back({g, 2, {}});
  const Workflow soykb = generate_pipeline(stages, StagePattern::matched);
  for (const auto& g : groups) {
    CHECK(std::count_if(soykb.tasks.begin(), soykb.tasks.end(),
                        [&](const Task& t) { return t.group == g; }) == 2);
  }
  // matched pattern: equal widths connect 1-to-1
  CHECK(oracle::direct_edges(soykb).size() == 2 * (groups.size() - 1));
}

TEST_CASE("generator outputs round-trip and validate") {
  std::mt19937_64 rng(7);
  const std::vector<Workflow> samples = {
      generate_bag(17), generate_fan(9),
      generate_pipeline({{"a", 2, {}}, {"b", 3, {}}, {"c", 1, {}}}),
      generate_pipeline({{"a", 3, {}}, {"b", 3, {}}}, StagePattern::matched),
      oracle::random_workflow(rng, 30)};
  for (const auto& w : samples) {
    CHECK(validate_workflow(w).empty());
    CHECK(structurally_equal(parse_workflow(serialize_workflow(w)), w));
  }
}

TEST_CASE("ready_tasks is monotone in the completed set") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 50; ++iter) {
    const Workflow w = oracle::random_workflow(rng, 25);
    REQUIRE(validate_workflow(w).empty());

    std::set<std::string> c1, c2;
    // grow c1 along a valid execution order, then extend it into c2
    for (int grow = 0; grow < 2; ++grow) {
      auto& target = grow == 0 ? c1 : c2;
      target = c1;
      const int steps = static_cast<int>(rng() % (w.tasks.size() + 1));
      for (int s = 0; s < steps; ++s) {
        const auto ready = ready_tasks(w, target);
        if (ready.empty()) break;
        target.insert(ready[rng() % ready.size()]);
      }
    }

    const auto r1 = ready_tasks(w, c1);
    const auto r2 = ready_tasks(w, c2);
    for (const auto& id : r1) {
      if (c2.count(id)) continue;
      CHECK(std::find(r2.begin(), r2.end(), id) != r2.end());
    }
  }
}

TEST_CASE("kahn-style elimination reaches every task of valid workflows") {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 30; ++iter) {
    const Workflow w = oracle::random_workflow(rng, 40);
    // acyclic by construction: validation must agree
    CHECK(validate_workflow(w).empty());
    // and executing greedily must reach every task
    std::set<std::string> done;
    while (done.size() < w.tasks.size()) {
      const auto ready = ready_tasks(w, done);
      REQUIRE_FALSE(ready.empty());
      done.insert(ready.begin(), ready.end());
    }
  }
}
