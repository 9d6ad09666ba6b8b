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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfreeze/sensing.hpp"

namespace dfreeze::harness {

inline constexpr int kConfigSchemaVersion = 1;

enum class Experiment {
  freezing_spectrum,
  micromotion,
  long_time_decay,
  sensing_sweep,
  sensitivity_table,
  coherence_fit
};

std::string to_string(Experiment e);
std::optional<Experiment> experiment_from_string(const std::string& s);
const std::vector<Experiment>& all_experiments();
std::string describe(Experiment e);

struct Issue {
  std::string path;  // JSON pointer-like, e.g. "schedule.rabi_MHz"
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;
  bool ok() const { return errors.empty(); }
  std::string to_text() const;
};

struct EnsembleSpec {
  int n = 8;
  double density = 3e-4;        // nm^-3
  double min_distance = 2.0;    // nm
  double disorder_width = 0.0;  // rad/us
  std::string path;             // optional ensemble JSON; overrides sampling
};

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::ideal_toggle;
  double period = 4.0;   // us
  double rabi = 0.0;     // rad/us
  std::optional<double> detuning;  // rad/us; unset selects the first freezing point
  double phase = 0.0;
  double tau = 0.05;
  double t_pi = 0.032;
  int pdd_cycles = 1;
};

struct EvolutionSpec {
  int periods = 200;
  int samples_per_period = 10;
  double window_start = 0.0;  // us
  double window_stop = 0.0;   // us; 0 means end of run
};

struct DtwaSpec {
  int n_traj = 1000;
  double dt = 0.0;  // us; 0 selects the solver default
  int batch_size = 128;
};

struct SweepSpec {
  std::vector<double> h_t_over_2pi;
  std::vector<double> detuning;      // rad/us
  std::vector<double> rabi;          // rad/us
  std::vector<double> b_ac;          // uT
  std::vector<double> sensing_time;  // us
};

struct SensingSpec {
  sensing::Protocol protocol = sensing::Protocol::df;
  sensing::Mode mode = sensing::Mode::ideal_rectification;
  std::optional<double> frequency_mhz;  // defaults to the filter center
  std::optional<double> phase;          // defaults to the optimal phase
  double t_prime = 0.0;
  double near_halfwidth = 5.0;  // uT
  double n_trials = 1.0;
  sensing::PddBudget budget;
};

struct SyntheticCoherence {
  double t2 = 10.2;
  double alpha = 0.81;
  double noise = 0.01;
  int n_points = 60;
  double t_min = 0.5;
  double t_max = 40.0;
};

struct CoherenceSpec {
  std::string data_path;  // CSV with columns t_us,value
  std::optional<SyntheticCoherence> synthetic;
  std::optional<double> fixed_alpha;
};

struct RunConfig {
  Experiment experiment = Experiment::freezing_spectrum;
  sensing::Backend backend = sensing::Backend::ed;
  std::vector<std::uint64_t> ensemble_seeds;
  std::optional<std::uint64_t> trajectory_seed;
  EnsembleSpec ensemble;
  ProductState initial;
  ScheduleSpec schedule;
  EvolutionSpec evolution;
  DtwaSpec dtwa;
  SweepSpec sweep;
  SensingSpec sensing;
  CoherenceSpec coherence;
  std::string output_dir = "out";
  nlohmann::json source;  // the validated input document

  void apply_seed_override(std::uint64_t seed);
};

/// Parses and validates; errors and warnings carry field paths. Returns a
/// config only when the report has no errors.
std::optional<RunConfig> parse_config(const nlohmann::json& j, ValidationReport& report);

/// Reads the file, parses JSON, and validates. Syntax errors become report errors.
std::optional<RunConfig> load_config(const std::string& path, ValidationReport& report);

/// Grid helper: inclusive arithmetic progression or explicit values.
std::vector<double> expand_axis(const nlohmann::json& axis, const std::string& path,
                                ValidationReport& report);

}  // namespace dfreeze::harness
