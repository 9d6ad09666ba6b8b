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

// dfreeze: run, validate and list desk-scale dynamical-freezing experiments.
// Exit codes: 0 success, 1 job failure, 2 usage or validation error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "dfreeze/harness/config.hpp"
#include "dfreeze/harness/runner.hpp"

namespace h = dfreeze::harness;

int main(int argc, char** argv) {
  CLI::App app{"dfreeze: dynamical-freezing simulations (ED and DTWA)"};
  app.set_version_flag("--version", h::version());
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::optional<std::uint64_t> seed_override;

  auto* run = app.add_subcommand("run", "Execute an experiment configuration");
  run->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--workers", workers, "Concurrent jobs")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run->add_option("--seed-override", seed_override, "Replace all seeds with N, N+1, ...");

  auto* validate = app.add_subcommand("validate", "Check a configuration without running it");
  validate->add_option("--config", config_path, "Run configuration (JSON)")->required();

  app.add_subcommand("list-experiments", "List experiment kinds");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("list-experiments")) {
    for (auto e : h::all_experiments()) std::cout << h::to_string(e) << "\t" << h::describe(e) << '\n';
    return 0;
  }

  h::ValidationReport report;
  auto config = h::load_config(config_path, report);
  std::cerr << report.to_text();

  if (app.got_subcommand("validate")) {
    if (report.ok()) std::cout << "ok: " << config_path << '\n';
    return report.ok() ? 0 : 2;
  }

  if (!config) return 2;
  if (seed_override) config->apply_seed_override(*seed_override);
  h::RunOptions opt;
  opt.workers = workers;
  opt.out_dir = out_dir;
  try {
    const auto s = h::run(*config, opt, std::cerr);
    std::cout << "manifest: " << s.manifest_path << "\ninputs_hash: " << s.inputs_hash << '\n';
    if (s.failed_jobs) {
      std::cerr << s.failed_jobs << " job(s) failed; see the manifest for diagnostics\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
