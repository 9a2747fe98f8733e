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

#include "flowsim/dax.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <set>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace flowsim {

namespace {

namespace pt = boost::property_tree;

std::string attr(const pt::ptree& node, const std::string& name) {
  return node.get<std::string>("<xmlattr>." + name, "");
}

}  // namespace

DaxResult convert_dax(const std::string& xml_text) {
  pt::ptree doc;
  try {
    std::istringstream in(xml_text);
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw DaxError(std::string("malformed XML: ") + e.what());
  }

  const auto adag = doc.get_child_optional("adag");
  if (!adag) throw DaxError("not a DAX document: missing <adag> root element");

  DaxResult result;
  Workflow& w = result.workflow;
  w.name = attr(*adag, "name").empty() ? "dax" : attr(*adag, "name");

  std::map<std::string, std::size_t> task_idx;        // job id -> task index
  std::map<std::string, std::uint64_t> file_sizes;    // file name -> bytes
  std::set<std::string> file_ids;

  const auto ensure_file = [&](const std::string& fname, std::uint64_t size) {
    if (file_ids.insert(fname).second) {
      w.data.push_back({fname, fname, size});
    } else if (size > 0) {
      for (auto& d : w.data) {
        if (d.id == fname && d.size_bytes == 0) d.size_bytes = size;
      }
    }
  };

  for (const auto& [tag, node] : *adag) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
    if (tag == "job") {
      const std::string job_id = attr(node, "id");
      if (job_id.empty()) throw DaxError("job element without id attribute");
      if (task_idx.count(job_id)) throw DaxError("duplicate job id: " + job_id);
      Task t;
      t.id = job_id;
      t.name = attr(node, "name").empty() ? job_id : attr(node, "name");
      t.group = t.name;
      t.work_gcs = 1.0;
      t.parallelism = 1;
      t.memory_mb = 128;
      t.disk_mb = 0;
      for (const auto& [jtag, jnode] : node) {
        if (jtag == "<xmlattr>" || jtag == "<xmlcomment>") continue;
        if (jtag != "uses") {
          result.warnings.push_back("job " + job_id + ": skipped unsupported element <" + jtag + ">");
          continue;
        }
        std::string fname = attr(jnode, "name");
        if (fname.empty()) fname = attr(jnode, "file");
        if (fname.empty()) {
          result.warnings.push_back("job " + job_id + ": <uses> without a file name, skipped");
          continue;
        }
        std::uint64_t size = 0;
        try {
          size = jnode.get<std::uint64_t>("<xmlattr>.size", 0);
        } catch (const pt::ptree_error&) {
          size = 0;
        }
        const std::string link = attr(jnode, "link");
        if (link == "input") {
          ensure_file(fname, size);
          t.inputs.push_back(fname);
        } else if (link == "output") {
          ensure_file(fname, size);
          t.outputs.push_back(fname);
        } else {
          result.warnings.push_back("job " + job_id + ": <uses " + fname +
                                    "> with unsupported link '" + link + "', skipped");
        }
      }
      task_idx.emplace(job_id, w.tasks.size());
      w.tasks.push_back(std::move(t));
    } else if (tag != "child") {
      result.warnings.push_back("skipped unsupported element <" + tag + ">");
    }
  }

  // Dependencies already carried by a shared file, for edge deduplication.
  std::set<std::pair<std::size_t, std::size_t>> file_edges;
  {
    const WorkflowIndex idx(w);
    for (std::size_t d = 0; d < w.data.size(); ++d) {
      const auto p = idx.producer_of[d];
      if (p == WorkflowIndex::npos) continue;
      for (const auto c : idx.consumers_of[d]) file_edges.emplace(p, c);
    }
  }

  for (const auto& [tag, node] : *adag) {
    if (tag != "child") continue;
    const std::string child_id = attr(node, "ref");
    const auto child_it = task_idx.find(child_id);
    if (child_it == task_idx.end()) {
      throw DaxError("child element references undeclared job: " + child_id);
    }
    for (const auto& [ptag, pnode] : node) {
      if (ptag == "<xmlattr>" || ptag == "<xmlcomment>") continue;
      if (ptag != "parent") {
        result.warnings.push_back("child " + child_id + ": skipped unsupported element <" + ptag + ">");
        continue;
      }
      const std::string parent_id = attr(pnode, "ref");
      const auto parent_it = task_idx.find(parent_id);
      if (parent_it == task_idx.end()) {
        throw DaxError("child " + child_id + " references undeclared parent: " + parent_id);
      }
      if (file_edges.count({parent_it->second, child_it->second})) continue;
      const std::string dep_id = "dep-" + parent_id + "-" + child_id;
      if (file_ids.insert(dep_id).second) {
        w.data.push_back({dep_id, dep_id, 0});
        w.tasks[parent_it->second].outputs.push_back(dep_id);
        w.tasks[child_it->second].inputs.push_back(dep_id);
        file_edges.emplace(parent_it->second, child_it->second);
      }
    }
  }

  const auto issues = validate_workflow(w);
  if (!issues.empty()) {
    throw DaxError("converted workflow does not validate: " + issues.front().message);
  }
  return result;
}

}  // namespace flowsim
