// Copyright 2026 The dfreeze Authors
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
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dfreeze/harness/config.hpp"

namespace dfreeze::harness {

/// Output of one job, buffered in memory until the pool finishes.
struct JobResult {
  std::string id;
  bool ok = true;
  std::string diagnostics;
  double wall_time_s = 0.0;
  std::map<std::string, std::string> rows;   // merged CSV name -> rows without header
  std::map<std::string, std::string> files;  // standalone file name -> content
};

struct Job {
  std::string id;
  std::function<void(JobResult&)> run;
};

struct ExperimentPlan {
  std::vector<Job> jobs;
  std::map<std::string, std::string> csv_headers;  // merged CSV name -> header line
  // Optional reduction over all job results (in job order).
  std::function<void(const std::vector<JobResult>&, JobResult&)> reduce;
};

ExperimentPlan plan_experiment(const RunConfig& config);

struct RunOptions {
  int workers = 1;
  std::string out_dir;  // overrides config.output_dir when non-empty
};

struct RunSummary {
  int failed_jobs = 0;
  std::string manifest_path;
  std::string inputs_hash;
};

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

/// Hash of every input that affects outputs: the effective configuration
/// (without output_dir), referenced input files, and the library version.
std::string inputs_hash(const RunConfig& config);

/// Runs all jobs on a bounded pool, writes merged CSVs, standalone files and
/// manifest.json. Returns the summary; failed_jobs > 0 means nonzero exit.
RunSummary run(const RunConfig& config, const RunOptions& options, std::ostream& log);

std::string version();

}  // namespace dfreeze::harness
