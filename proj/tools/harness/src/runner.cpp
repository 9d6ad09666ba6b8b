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

#include "dfreeze/harness/runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace dfreeze::harness {

namespace fs = std::filesystem;
using nlohmann::json;

#ifndef DFREEZE_VERSION_STRING
#define DFREEZE_VERSION_STRING "unknown"
#endif

std::string version() { return DFREEZE_VERSION_STRING; }

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json effective_config(const RunConfig& c) {
  json j = c.source;
  j.erase("output_dir");
  j["seeds"]["ensemble"] = c.ensemble_seeds;
  if (c.trajectory_seed) j["seeds"]["trajectories"] = *c.trajectory_seed;
  return j;
}

}  // namespace

std::string inputs_hash(const RunConfig& c) {
  std::string bytes = "dfreeze " + version() + "\n" + effective_config(c).dump();
  if (!c.ensemble.path.empty()) bytes += "\nensemble:" + slurp(c.ensemble.path);
  if (!c.coherence.data_path.empty()) bytes += "\ncoherence:" + slurp(c.coherence.data_path);
  return fnv1a_hex(bytes);
}

RunSummary run(const RunConfig& config, const RunOptions& options, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path out = options.out_dir.empty() ? fs::path(config.output_dir) : fs::path(options.out_dir);
  fs::create_directories(out);

  RunSummary summary;
  summary.inputs_hash = inputs_hash(config);

  ExperimentPlan plan = plan_experiment(config);
  std::vector<JobResult> results(plan.jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t k = next++; k < plan.jobs.size(); k = next++) {
      JobResult& r = results[k];
      r.id = plan.jobs[k].id;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        plan.jobs[k].run(r);
      } catch (const std::exception& e) {
        r.ok = false;
        r.diagnostics = e.what();
        r.rows.clear();
        r.files.clear();
      }
      r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::lock_guard<std::mutex> lock(log_mutex);
      log << (r.ok ? "[ok]   " : "[FAIL] ") << r.id;
      if (!r.ok) log << ": " << r.diagnostics;
      log << '\n';
    }
  };
  const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(plan.jobs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& r : results) summary.failed_jobs += !r.ok;

  JobResult reduced;
  reduced.id = "reduce";
  if (plan.reduce && summary.failed_jobs == 0) {
    try {
      plan.reduce(results, reduced);
    } catch (const std::exception& e) {
      reduced.ok = false;
      reduced.diagnostics = e.what();
      ++summary.failed_jobs;
    }
  }

  // Merge per-job buffers in job order; single writer, no concurrent appends.
  json files = json::array();
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(out / name, std::ios::binary);
    f << content;
    files.push_back({{"path", name}, {"bytes", content.size()}, {"fnv1a", fnv1a_hex(content)}});
  };
  for (const auto& [name, header] : plan.csv_headers) {
    std::string content = header + "\n";
    for (const auto& r : results) {
      if (auto it = r.rows.find(name); it != r.rows.end()) content += it->second;
    }
    if (auto it = reduced.rows.find(name); it != reduced.rows.end()) content += it->second;
    write(name, content);
    json side = {{"generator", "dfreeze"},
                 {"version", version()},
                 {"experiment", to_string(config.experiment)},
                 {"inputs_hash", summary.inputs_hash},
                 {"columns", header}};
    write(name + ".json", side.dump(2) + "\n");
  }
  for (const auto& r : results) {
    for (const auto& [name, content] : r.files) write(name, content);
  }
  for (const auto& [name, content] : reduced.files) write(name, content);

  json jobs = json::array();
  for (const auto& r : results) {
    json j = {{"id", r.id}, {"status", r.ok ? "ok" : "failed"}, {"wall_time_s", r.wall_time_s}};
    if (!r.ok) j["diagnostics"] = r.diagnostics;
    jobs.push_back(j);
  }
  if (plan.reduce) {
    json j = {{"id", "reduce"}, {"status", reduced.ok ? "ok" : (summary.failed_jobs ? "skipped" : "failed")}};
    if (!reduced.ok) j["diagnostics"] = reduced.diagnostics;
    jobs.push_back(j);
  }

  json manifest = {
      {"generator", "dfreeze"},
      {"version", version()},
      {"schema_version", kConfigSchemaVersion},
      {"experiment", to_string(config.experiment)},
      {"backend", sensing::to_string(config.backend)},
      {"inputs_hash", summary.inputs_hash},
      {"config", effective_config(config)},
      {"workers", workers},
      {"wall_time_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
      {"failed_jobs", summary.failed_jobs},
      {"jobs", jobs},
      {"files", files},
  };
  const fs::path mpath = out / "manifest.json";
  std::ofstream(mpath) << manifest.dump(2) << '\n';
  summary.manifest_path = mpath.string();
  return summary;
}

}  // namespace dfreeze::harness
