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

#include <string>
#include <vector>

#include "flowsim/workflow.hpp"

namespace flowsim {

struct DaxError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DaxResult {
  Workflow workflow;
  // unsupported elements are skipped and reported here, one entry each
  std::vector<std::string> warnings;
};

/// Converts the job/uses/child-parent subset of the Pegasus DAX format.
/// Jobs become tasks, files become data items, and declared child/parent
/// edges not already carried by a shared file get a synthetic zero-byte item.
/// Throws DaxError on malformed XML or a dependency naming an unknown job.
DaxResult convert_dax(const std::string& xml_text);

}  // namespace flowsim
