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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "flowsim/bench.hpp"
#include "flowsim/dax.hpp"
#include "flowsim/engine.hpp"
#include "flowsim/metrics.hpp"
#include "flowsim/pricing.hpp"
#include "flowsim/routing.hpp"
#include "flowsim/workflow.hpp"

namespace {

namespace fs = std::filesystem;
using namespace flowsim;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;      // configuration or usage error
constexpr int kExitIncomplete = 3;  // execution finished with failed tasks

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// temp file in the target directory, then rename: readers never observe a
// partially written file
void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ConfigError("short write: " + tmp.string());
  }
  fs::rename(tmp, path);
}

struct TemplateFlags {
  TaskTemplate tmpl;
  std::string hint;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--group", tmpl.group, "Task group for generated tasks");
    cmd.add_option("--work-gcs", tmpl.work_gcs, "Compute demand per task (GHz-seconds)");
    cmd.add_option("--parallelism", tmpl.parallelism, "Cores a task can use");
    cmd.add_option("--memory-mb", tmpl.memory_mb, "Memory requirement (MB)");
    cmd.add_option("--disk-mb", tmpl.disk_mb, "Disk requirement (MB)");
    cmd.add_option("--input-bytes", tmpl.input_bytes, "Size of generated input items");
    cmd.add_option("--output-bytes", tmpl.output_bytes, "Size of generated output items");
    cmd.add_option("--hint", hint, "executor_hint for generated tasks");
  }

  TaskTemplate resolve() const {
    TaskTemplate t = tmpl;
    if (!hint.empty()) t.executor_hint = hint;
    return t;
  }
};

std::vector<StageSpec> parse_stage_list(const std::string& spec, const TaskTemplate& tmpl) {
  std::vector<StageSpec> stages;
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.rfind(':');
    StageSpec s;
    s.tmpl = tmpl;
    if (colon == std::string::npos) {
      s.group = item;
      s.width = 1;
    } else {
      s.group = item.substr(0, colon);
      try {
        s.width = std::stoi(item.substr(colon + 1));
      } catch (const std::exception&) {
        throw ConfigError("bad stage spec '" + item + "', expected group:width");
      }
    }
    if (s.group.empty()) throw ConfigError("bad stage spec '" + item + "', empty group");
    s.tmpl.group = s.group;
    stages.push_back(std::move(s));
  }
  if (stages.empty()) throw ConfigError("stage list is empty");
  return stages;
}

struct RunFlags {
  std::string workflow_path;
  std::string dax_path;
  int bag_n = 0;
  int fan_width = 0;
  std::string stages;
  std::string pattern = "all";
  TemplateFlags tmpl_flags;

  std::string profiles_path;
  std::string policy_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  EngineConfig engine;
};

Workflow load_run_workflow(const RunFlags& f) {
  int sources = 0;
  for (const bool set : {!f.workflow_path.empty(), !f.dax_path.empty(), f.bag_n > 0,
                         f.fan_width > 0, !f.stages.empty()}) {
    if (set) ++sources;
  }
  if (sources != 1) {
    throw ConfigError("exactly one of --workflow, --dax, --bag, --fan, --stages is required");
  }
  if (!f.workflow_path.empty()) return parse_workflow(read_file(f.workflow_path));
  if (!f.dax_path.empty()) {
    auto result = convert_dax(read_file(f.dax_path));
    for (const auto& warning : result.warnings) std::cerr << "dax: " << warning << "\n";
    return std::move(result.workflow);
  }
  const TaskTemplate tmpl = f.tmpl_flags.resolve();
  if (f.bag_n > 0) return generate_bag(f.bag_n, tmpl);
  if (f.fan_width > 0) return generate_fan(f.fan_width, tmpl);
  const auto pattern = f.pattern == "matched" ? StagePattern::matched : StagePattern::all_to_all;
  return generate_pipeline(parse_stage_list(f.stages, tmpl), pattern);
}

std::map<std::string, ExecutorState> build_states(const std::vector<ExecutorProfile>& profiles) {
  std::map<std::string, ExecutorState> states;
  for (const auto& p : profiles) states.emplace(p.name, ExecutorState(p));
  return states;
}

RoutingPolicy load_or_default_policy(const std::string& policy_path,
                                     const std::vector<ExecutorProfile>& profiles) {
  if (!policy_path.empty()) return load_policy(read_file(policy_path));
  RoutingPolicy policy;
  for (const auto& p : profiles) policy.preference.push_back(p.name);
  return policy;
}

void write_run_outputs(const fs::path& out_dir, const ExecutionTrace& trace,
                       const std::vector<ExecutorProfile>& profiles) {
  fs::create_directories(out_dir);
  std::map<std::string, BillingScheme> schemes;
  for (const auto& p : profiles) schemes.emplace(p.name, p.billing);

  write_file_atomic(out_dir / "trace.jsonl", serialize_trace(trace));
  write_file_atomic(out_dir / "gantt.csv", export_gantt_csv(trace, GanttMode::flattened));
  write_file_atomic(out_dir / "cost.json", serialize_cost_report(cost_report(trace, schemes)));
  write_file_atomic(out_dir / "stats.json", serialize_stats(trace));
}

int cmd_run(const RunFlags& f) {
  const Workflow w = load_run_workflow(f);
  const auto issues = validate_workflow(w);
  if (!issues.empty()) {
    for (const auto& issue : issues) std::cerr << "invalid workflow: " << issue.message << "\n";
    return kExitConfig;
  }
  const auto profiles = load_profiles(read_file(f.profiles_path));
  const RoutingPolicy policy = load_or_default_policy(f.policy_path, profiles);
  auto states = build_states(profiles);

  EngineConfig cfg = f.engine;
  cfg.seed = f.seed;

  ExecutionTrace trace;
  try {
    trace = run(w, policy, states, cfg);
  } catch (const UnroutableError& e) {
    std::cerr << e.what() << "\n";
    return kExitIncomplete;
  }

  write_run_outputs(f.out_dir, trace, profiles);

  std::cout << "workflow:  " << trace.workflow_name << "\n"
            << "tasks:     " << w.tasks.size() << "\n"
            << "attempts:  " << trace.attempts.size() << "\n"
            << "makespan:  " << format_double(trace.makespan_s) << " s\n";
  for (const auto& [name, c] : trace.executor_counters) {
    std::cout << "executor " << name << ": admitted " << c.admitted << ", throttled "
              << c.throttled << ", cold " << c.cold_starts << ", warm " << c.warm_starts
              << ", peak " << c.peak_running << "\n";
  }
  if (!trace.complete) {
    for (const auto& fail : trace.failed_tasks) {
      std::cerr << "failed: " << fail.task_id << " (" << fail.reason << ")\n";
    }
    return kExitIncomplete;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serverless scientific-workflow simulator"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Generate a workflow JSON file");
  std::string gen_kind;
  int gen_n = 100, gen_width = 8;
  std::string gen_stages, gen_pattern = "all", gen_out;
  TemplateFlags gen_tmpl;
  generate->add_option("--kind", gen_kind, "bag | fan | pipeline")->required();
  generate->add_option("--n", gen_n, "Task count (bag)");
  generate->add_option("--width", gen_width, "Parallel width (fan)");
  generate->add_option("--stages", gen_stages, "Stage list group:width,... (pipeline)");
  generate->add_option("--pattern", gen_pattern, "Stage linking: all | matched (pipeline)");
  generate->add_option("--out", gen_out, "Output path")->required();
  gen_tmpl.add_to(*generate);

  // validate
  auto* validate = app.add_subcommand("validate", "Validate a workflow JSON file");
  std::string val_workflow;
  validate->add_option("--workflow", val_workflow, "Workflow JSON path")->required();

  // run
  auto* run_cmd = app.add_subcommand("run", "Simulate a workflow and write reports");
  RunFlags rf;
  run_cmd->add_option("--workflow", rf.workflow_path, "Workflow JSON path");
  run_cmd->add_option("--dax", rf.dax_path, "DAX XML path (converted on the fly)");
  run_cmd->add_option("--bag", rf.bag_n, "Generate a bag of N tasks");
  run_cmd->add_option("--fan", rf.fan_width, "Generate a fan of the given width");
  run_cmd->add_option("--stages", rf.stages, "Generate a pipeline, group:width,...");
  run_cmd->add_option("--pattern", rf.pattern, "Stage linking: all | matched");
  rf.tmpl_flags.add_to(*run_cmd);
  run_cmd->add_option("--profiles", rf.profiles_path, "Executor profiles JSON")->required();
  run_cmd->add_option("--policy", rf.policy_path, "Routing policy JSON");
  run_cmd->add_option("--out", rf.out_dir, "Output directory");
  run_cmd->add_option("--seed", rf.seed, "Simulation seed");
  run_cmd->add_option("--engine.max_task_retries", rf.engine.max_task_retries,
                      "Retry budget per task (timeouts/failures)");
  run_cmd->add_option("--engine.backoff_initial_s", rf.engine.throttle_backoff.initial_s,
                      "Initial retry backoff");
  run_cmd->add_option("--engine.backoff_multiplier", rf.engine.throttle_backoff.multiplier,
                      "Backoff multiplier");
  run_cmd->add_option("--engine.backoff_max_s", rf.engine.throttle_backoff.max_s,
                      "Backoff ceiling");
  run_cmd->add_option("--engine.submit_jitter_s", rf.engine.submit_jitter_s,
                      "Uniform client submission latency (0 disables)");

  // report
  auto* report = app.add_subcommand("report", "Regenerate reports from a trace");
  std::string rep_trace, rep_profiles, rep_out = ".";
  report->add_option("--trace", rep_trace, "trace.jsonl path")->required();
  report->add_option("--profiles", rep_profiles, "Executor profiles JSON")->required();
  report->add_option("--out", rep_out, "Output directory");

  // burst-bench
  auto* bench = app.add_subcommand("burst-bench", "Measure admission bursts of one executor");
  std::string bb_profile, bb_profiles, bb_out;
  int bb_n = 100, bb_repeats = 10;
  std::uint64_t bb_seed = 0;
  double bb_work = 0.0;
  std::optional<double> bb_refill;
  bench->add_option("--profile", bb_profile, "Executor profile name")->required();
  bench->add_option("--profiles", bb_profiles, "Executor profiles JSON")->required();
  bench->add_option("--n", bb_n, "Submissions per repeat");
  bench->add_option("--repeats", bb_repeats, "Number of consecutive runs");
  bench->add_option("--seed", bb_seed, "Simulation seed");
  bench->add_option("--work-gcs", bb_work, "Per-task compute demand");
  bench->add_option("--refill", bb_refill, "Override burst_refill_per_s");
  bench->add_option("--out", bb_out, "CSV output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (generate->parsed()) {
      Workflow w;
      const TaskTemplate tmpl = gen_tmpl.resolve();
      if (gen_kind == "bag") {
        w = generate_bag(gen_n, tmpl);
      } else if (gen_kind == "fan") {
        w = generate_fan(gen_width, tmpl);
      } else if (gen_kind == "pipeline") {
        const auto pattern =
            gen_pattern == "matched" ? StagePattern::matched : StagePattern::all_to_all;
        w = generate_pipeline(parse_stage_list(gen_stages, tmpl), pattern);
      } else {
        throw ConfigError("unknown --kind '" + gen_kind + "', expected bag|fan|pipeline");
      }
      write_file_atomic(gen_out, serialize_workflow(w));
      std::cout << "wrote " << gen_out << " (" << w.tasks.size() << " tasks)\n";
      return kExitOk;
    }

    if (validate->parsed()) {
      const Workflow w = parse_workflow(read_file(val_workflow));
      const auto issues = validate_workflow(w);
      for (const auto& issue : issues) std::cout << issue.message << "\n";
      if (!issues.empty()) return kExitConfig;
      std::cout << "valid: " << w.tasks.size() << " tasks, " << w.data.size() << " data items\n";
      return kExitOk;
    }

    if (run_cmd->parsed()) return cmd_run(rf);

    if (report->parsed()) {
      const ExecutionTrace trace = deserialize_trace(read_file(rep_trace));
      const auto profiles = load_profiles(read_file(rep_profiles));
      write_run_outputs(rep_out, trace, profiles);
      std::cout << "wrote reports for " << trace.workflow_name << " to " << rep_out << "\n";
      return kExitOk;
    }

    if (bench->parsed()) {
      const auto profiles = load_profiles(read_file(bb_profiles));
      const ExecutorProfile* profile = nullptr;
      for (const auto& p : profiles) {
        if (p.name == bb_profile) profile = &p;
      }
      if (!profile) throw ConfigError("unknown profile: " + bb_profile);
      ExecutorProfile chosen = *profile;
      if (bb_refill) chosen.burst_refill_per_s = *bb_refill;
      const auto result = burst_bench(chosen, bb_n, bb_repeats, bb_seed, bb_work);
      const std::string csv = burst_bench_csv(result);
      if (bb_out.empty()) {
        std::cout << csv;
      } else {
        write_file_atomic(bb_out, csv);
      }
      return kExitOk;
    }
  } catch (const UnroutableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIncomplete;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
