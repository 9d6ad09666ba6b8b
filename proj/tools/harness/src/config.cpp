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

#include "dfreeze/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dfreeze/units.hpp"

namespace dfreeze::harness {

using nlohmann::json;

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::freezing_spectrum: return "freezing_spectrum";
    case Experiment::micromotion: return "micromotion";
    case Experiment::long_time_decay: return "long_time_decay";
    case Experiment::sensing_sweep: return "sensing_sweep";
    case Experiment::sensitivity_table: return "sensitivity_table";
    case Experiment::coherence_fit: return "coherence_fit";
  }
  return "unknown";
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = {
      Experiment::freezing_spectrum, Experiment::micromotion,       Experiment::long_time_decay,
      Experiment::sensing_sweep,     Experiment::sensitivity_table, Experiment::coherence_fit};
  return all;
}

std::optional<Experiment> experiment_from_string(const std::string& s) {
  for (auto e : all_experiments()) {
    if (to_string(e) == s) return e;
  }
  return std::nullopt;
}

std::string describe(Experiment e) {
  switch (e) {
    case Experiment::freezing_spectrum:
      return "m_z(t) over a detuning sweep plus cumulative time averages (sweep.hT_over_2pi)";
    case Experiment::micromotion:
      return "m(t) at a freezing point with DFT spectra over a late window";
    case Experiment::long_time_decay:
      return "stroboscopic m_z decay and half-times over (rabi_MHz x detuning_MHz)";
    case Experiment::sensing_sweep:
      return "sensing response over (b_ac_uT x sensing_time_us)";
    case Experiment::sensitivity_table:
      return "sensing sweep reduced to sensitivities per T_s and region, plus the PDD budget curve";
    case Experiment::coherence_fit:
      return "stretched-exponential fit to coherence data (CSV or synthetic)";
  }
  return "";
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  for (const auto& e : errors) os << "error: " << e.path << ": " << e.message << '\n';
  for (const auto& w : warnings) os << "warning: " << w.path << ": " << w.message << '\n';
  return os.str();
}

void RunConfig::apply_seed_override(std::uint64_t seed) {
  const std::size_t count = std::max<std::size_t>(1, ensemble_seeds.size());
  ensemble_seeds.clear();
  for (std::size_t i = 0; i < count; ++i) ensemble_seeds.push_back(seed + i);
  trajectory_seed = seed;
}

namespace {

// Reads typed fields from an object, recording unknown keys and type errors.
class Section {
 public:
  Section(const json& j, std::string path, ValidationReport& r, std::set<std::string> allowed)
      : j_(j), path_(std::move(path)), r_(r) {
    if (!j_.is_object()) {
      r_.errors.push_back({path_, "must be an object"});
      return;
    }
    for (const auto& [k, v] : j_.items()) {
      if (!allowed.count(k)) r_.errors.push_back({at(k), "unknown field"});
    }
  }

  std::string at(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return j_.is_object() && j_.contains(k); }
  const json& raw(const std::string& k) const { return j_.at(k); }

  template <class T>
  void get(const std::string& k, T& out) {
    if (!has(k)) return;
    try {
      out = j_.at(k).get<T>();
    } catch (const json::exception&) {
      r_.errors.push_back({at(k), "wrong type"});
    }
  }

  void number(const std::string& k, double& out, double lo = -HUGE_VAL, bool strict_lo = false) {
    if (!has(k)) return;
    if (!j_.at(k).is_number()) {
      r_.errors.push_back({at(k), "must be a number"});
      return;
    }
    const double v = j_.at(k).get<double>();
    if (!std::isfinite(v) || (strict_lo ? !(v > lo) : !(v >= lo))) {
      std::ostringstream m;
      m << "must be " << (strict_lo ? "> " : ">= ") << lo;
      r_.errors.push_back({at(k), m.str()});
      return;
    }
    out = v;
  }

  // Ordinary-frequency field in MHz, stored in rad/us.
  void mhz(const std::string& k, double& out) {
    double v = 0.0;
    if (!has(k)) return;
    number(k, v);
    warn_if_angular(k, v);
    out = units::mhz_to_angular(v);
  }

  void mhz(const std::string& k, std::optional<double>& out) {
    if (!has(k)) return;
    double v = 0.0;
    mhz(k, v);
    out = v;
  }

  void warn_if_angular(const std::string& k, double v) {
    if (v == 0.0) return;
    const double r = v / units::kTwoPi;
    const double rr = std::round(r * 1000.0), vv = std::round(v * 1000.0);
    const bool r_round = std::abs(r * 1000.0 - rr) < 1e-6 * std::max(1.0, std::abs(r * 1000.0));
    const bool v_round = std::abs(v * 1000.0 - vv) < 1e-6 * std::max(1.0, std::abs(v * 1000.0));
    if (r_round && !v_round) {
      std::ostringstream m;
      m << "value " << v << " looks 2pi-inclusive (= 2pi x " << rr / 1000.0
        << "); fields ending in _MHz take ordinary frequency";
      r_.warnings.push_back({at(k), m.str()});
    }
  }

 private:
  const json& j_;
  std::string path_;
  ValidationReport& r_;
};

const json kEmpty = json::object();

const json& child(const json& j, const char* k) { return j.contains(k) ? j.at(k) : kEmpty; }

}  // namespace

std::vector<double> expand_axis(const json& axis, const std::string& path, ValidationReport& r) {
  std::vector<double> out;
  if (axis.is_array()) {
    for (const auto& v : axis) {
      if (!v.is_number()) {
        r.errors.push_back({path, "grid values must be numbers"});
        return {};
      }
      out.push_back(v.get<double>());
    }
  } else if (axis.is_object()) {
    Section s(axis, path, r, {"start", "stop", "step", "values"});
    if (s.has("values")) return expand_axis(axis.at("values"), path + ".values", r);
    double a = 0, b = 0, h = 0;
    if (!s.has("start") || !s.has("stop") || !s.has("step")) {
      r.errors.push_back({path, "grid needs start, stop and step (or values)"});
      return {};
    }
    s.number("start", a);
    s.number("stop", b);
    s.number("step", h, 0.0, true);
    if (h > 0.0 && b >= a) {
      const long n = static_cast<long>(std::floor((b - a) / h + 1e-9));
      if (n > 1000000) {
        r.errors.push_back({path, "grid has more than 10^6 points"});
        return {};
      }
      for (long k = 0; k <= n; ++k) out.push_back(a + h * static_cast<double>(k));
    }
  } else {
    r.errors.push_back({path, "grid must be an array or {start, stop, step}"});
    return {};
  }
  if (out.empty()) r.errors.push_back({path, "empty sweep grid"});
  return out;
}

std::optional<RunConfig> parse_config(const json& j, ValidationReport& r) {
  RunConfig c;
  c.source = j;
  Section top(j, "", r,
              {"schema_version", "experiment", "backend", "seeds", "ensemble", "initial_state", "schedule",
               "evolution", "dtwa", "sweep", "sensing", "coherence", "output_dir", "description"});
  if (!j.is_object()) return std::nullopt;

  if (!top.has("schema_version")) {
    r.errors.push_back({"schema_version", "missing"});
  } else if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kConfigSchemaVersion) {
    r.errors.push_back({"schema_version", "unsupported; expected 1"});
  }

  std::string exp;
  top.get("experiment", exp);
  if (exp.empty()) {
    r.errors.push_back({"experiment", "missing"});
  } else if (auto e = experiment_from_string(exp)) {
    c.experiment = *e;
  } else {
    r.errors.push_back({"experiment", "unknown experiment '" + exp + "'"});
  }

  std::string backend = "ed";
  top.get("backend", backend);
  if (backend == "ed") {
    c.backend = sensing::Backend::ed;
  } else if (backend == "dtwa") {
    c.backend = sensing::Backend::dtwa;
  } else {
    r.errors.push_back({"backend", "must be \"ed\" or \"dtwa\""});
  }
  top.get("output_dir", c.output_dir);

  // Seeds are mandatory: every stochastic input must be reproducible.
  {
    const json& s = child(j, "seeds");
    Section sec(s, "seeds", r, {"ensemble", "trajectories"});
    if (!top.has("seeds")) {
      r.errors.push_back({"seeds", "missing; seeds.ensemble is required for reproducibility"});
    } else {
      if (!sec.has("ensemble")) {
        r.errors.push_back({"seeds.ensemble", "missing"});
      } else {
        sec.get("ensemble", c.ensemble_seeds);
        if (c.ensemble_seeds.empty()) r.errors.push_back({"seeds.ensemble", "must list at least one seed"});
      }
      if (sec.has("trajectories")) {
        std::uint64_t t = 0;
        sec.get("trajectories", t);
        c.trajectory_seed = t;
      }
    }
    const bool stochastic = c.backend == sensing::Backend::dtwa ||
                            (c.experiment == Experiment::coherence_fit && child(j, "coherence").contains("synthetic"));
    if (stochastic && !c.trajectory_seed && top.has("seeds")) {
      r.errors.push_back({"seeds.trajectories", "missing; required for DTWA and synthetic data"});
    }
  }

  {
    Section s(child(j, "ensemble"), "ensemble", r,
              {"n", "density_per_nm3", "min_distance_nm", "disorder_width_MHz", "path"});
    s.get("n", c.ensemble.n);
    if (c.ensemble.n < 1) r.errors.push_back({"ensemble.n", "must be >= 1"});
    s.number("density_per_nm3", c.ensemble.density, 0.0, true);
    s.number("min_distance_nm", c.ensemble.min_distance, 0.0);
    s.mhz("disorder_width_MHz", c.ensemble.disorder_width);
    if (c.ensemble.disorder_width < 0.0) r.errors.push_back({"ensemble.disorder_width_MHz", "must be >= 0"});
    s.get("path", c.ensemble.path);
    if (c.backend == sensing::Backend::ed && c.ensemble.n > ed::kDefaultCapacity && c.ensemble.path.empty()) {
      r.errors.push_back({"ensemble.n", "exceeds the ED capacity of 12 spins; use backend \"dtwa\""});
    }
  }

  {
    Section s(child(j, "initial_state"), "initial_state", r, {"theta_rad", "phi_rad"});
    double th = 0.0, ph = 0.0;
    s.number("theta_rad", th);
    s.number("phi_rad", ph);
    if (th < 0.0 || th > units::kPi) {
      r.errors.push_back({"initial_state.theta_rad", "must lie in [0, pi]"});
    } else {
      c.initial = initial_state(th, ph);
    }
  }

  {
    Section s(child(j, "schedule"), "schedule", r,
              {"kind", "period_us", "rabi_MHz", "detuning_MHz", "phase_rad", "tau_us", "t_pi_us", "pdd_cycles"});
    std::string kind = "ideal_toggle";
    s.get("kind", kind);
    try {
      c.schedule.kind = schedule_kind_from_string(kind);
    } catch (const std::exception&) {
      r.errors.push_back({"schedule.kind", "unknown schedule kind '" + kind + "'"});
    }
    s.number("period_us", c.schedule.period, 0.0, true);
    s.mhz("rabi_MHz", c.schedule.rabi);
    s.mhz("detuning_MHz", c.schedule.detuning);
    s.number("phase_rad", c.schedule.phase);
    s.number("tau_us", c.schedule.tau, 0.0, true);
    s.number("t_pi_us", c.schedule.t_pi, 0.0, true);
    s.get("pdd_cycles", c.schedule.pdd_cycles);
  }

  {
    Section s(child(j, "evolution"), "evolution", r,
              {"periods", "samples_per_period", "window_start_us", "window_stop_us"});
    s.get("periods", c.evolution.periods);
    s.get("samples_per_period", c.evolution.samples_per_period);
    if (c.evolution.periods < 1) r.errors.push_back({"evolution.periods", "must be >= 1"});
    if (c.evolution.samples_per_period < 1) r.errors.push_back({"evolution.samples_per_period", "must be >= 1"});
    s.number("window_start_us", c.evolution.window_start, 0.0);
    s.number("window_stop_us", c.evolution.window_stop, 0.0);
    if (c.evolution.window_stop > 0.0 && c.evolution.window_stop <= c.evolution.window_start) {
      r.errors.push_back({"evolution.window_stop_us", "must exceed window_start_us"});
    }
  }

  {
    Section s(child(j, "dtwa"), "dtwa", r, {"n_traj", "dt_us", "batch_size"});
    s.get("n_traj", c.dtwa.n_traj);
    s.number("dt_us", c.dtwa.dt, 0.0);
    s.get("batch_size", c.dtwa.batch_size);
    if (c.dtwa.n_traj < 1) r.errors.push_back({"dtwa.n_traj", "must be >= 1"});
    if (c.dtwa.batch_size < 1) r.errors.push_back({"dtwa.batch_size", "must be >= 1"});
  }

  {
    const json& sw = child(j, "sweep");
    Section s(sw, "sweep", r, {"hT_over_2pi", "detuning_MHz", "rabi_MHz", "b_ac_uT", "sensing_time_us"});
    if (s.has("hT_over_2pi")) c.sweep.h_t_over_2pi = expand_axis(sw.at("hT_over_2pi"), "sweep.hT_over_2pi", r);
    if (s.has("b_ac_uT")) c.sweep.b_ac = expand_axis(sw.at("b_ac_uT"), "sweep.b_ac_uT", r);
    if (s.has("sensing_time_us")) c.sweep.sensing_time = expand_axis(sw.at("sensing_time_us"), "sweep.sensing_time_us", r);
    for (auto [key, dst] : {std::pair{"detuning_MHz", &c.sweep.detuning}, std::pair{"rabi_MHz", &c.sweep.rabi}}) {
      if (!s.has(key)) continue;
      const std::string path = std::string("sweep.") + key;
      for (double v : expand_axis(sw.at(key), path, r)) {
        s.warn_if_angular(key, v);
        dst->push_back(units::mhz_to_angular(v));
      }
    }
  }

  {
    const json& sj = child(j, "sensing");
    Section s(sj, "sensing", r,
              {"protocol", "mode", "frequency_MHz", "phase_rad", "t_prime_us", "near_halfwidth_uT", "n_trials",
               "budget"});
    std::string protocol = "DF", mode = "ideal_rectification";
    s.get("protocol", protocol);
    s.get("mode", mode);
    if (protocol == "DF") {
      c.sensing.protocol = sensing::Protocol::df;
    } else if (protocol == "PDD") {
      c.sensing.protocol = sensing::Protocol::pdd;
    } else {
      r.errors.push_back({"sensing.protocol", "must be \"DF\" or \"PDD\""});
    }
    if (mode == "ideal_rectification") {
      c.sensing.mode = sensing::Mode::ideal_rectification;
    } else if (mode == "explicit_pulses") {
      c.sensing.mode = sensing::Mode::explicit_pulses;
    } else {
      r.errors.push_back({"sensing.mode", "must be \"ideal_rectification\" or \"explicit_pulses\""});
    }
    if (s.has("frequency_MHz")) {
      double f = 0.0;
      s.number("frequency_MHz", f, 0.0, true);
      c.sensing.frequency_mhz = f;
    }
    if (s.has("phase_rad")) {
      double a = 0.0;
      s.number("phase_rad", a);
      c.sensing.phase = a;
    }
    s.number("t_prime_us", c.sensing.t_prime, 0.0);
    s.number("near_halfwidth_uT", c.sensing.near_halfwidth, 0.0);
    s.number("n_trials", c.sensing.n_trials, 0.0, true);
    const json& bj = child(sj, "budget");
    Section b(bj, "sensing.budget", r,
              {"t2_us", "alpha", "readout_efficiency", "t_init_us", "t_readout_us", "t_delay_us"});
    b.number("t2_us", c.sensing.budget.t2, 0.0, true);
    b.number("alpha", c.sensing.budget.alpha, 0.0, true);
    b.number("readout_efficiency", c.sensing.budget.readout_efficiency, 0.0, true);
    b.number("t_init_us", c.sensing.budget.t_init, 0.0);
    b.number("t_readout_us", c.sensing.budget.t_readout, 0.0);
    b.number("t_delay_us", c.sensing.budget.t_delay, 0.0);
  }

  {
    const json& cj = child(j, "coherence");
    Section s(cj, "coherence", r, {"data_path", "synthetic", "fixed_alpha"});
    s.get("data_path", c.coherence.data_path);
    if (s.has("fixed_alpha")) {
      double a = 0.0;
      s.number("fixed_alpha", a, 0.0, true);
      c.coherence.fixed_alpha = a;
    }
    if (s.has("synthetic")) {
      SyntheticCoherence syn;
      Section y(cj.at("synthetic"), "coherence.synthetic", r,
                {"t2_us", "alpha", "noise", "n_points", "t_min_us", "t_max_us"});
      y.number("t2_us", syn.t2, 0.0, true);
      y.number("alpha", syn.alpha, 0.0, true);
      y.number("noise", syn.noise, 0.0);
      y.get("n_points", syn.n_points);
      y.number("t_min_us", syn.t_min, 0.0);
      y.number("t_max_us", syn.t_max, 0.0, true);
      if (syn.t_max <= syn.t_min) r.errors.push_back({"coherence.synthetic.t_max_us", "must exceed t_min_us"});
      c.coherence.synthetic = syn;
    }
  }

  // Per-experiment requirements.
  auto need = [&](bool ok, const std::string& path, const std::string& msg) {
    if (!ok) r.errors.push_back({path, msg});
  };
  switch (c.experiment) {
    case Experiment::freezing_spectrum:
      need(!c.sweep.h_t_over_2pi.empty() || !c.sweep.detuning.empty(), "sweep.hT_over_2pi",
           "freezing_spectrum needs sweep.hT_over_2pi or sweep.detuning_MHz");
      break;
    case Experiment::micromotion:
      need(c.evolution.window_stop > 0.0, "evolution.window_stop_us", "micromotion needs a DFT window");
      break;
    case Experiment::long_time_decay:
      need(!c.sweep.rabi.empty(), "sweep.rabi_MHz", "long_time_decay needs a rabi_MHz grid");
      need(!c.sweep.detuning.empty(), "sweep.detuning_MHz", "long_time_decay needs a detuning_MHz grid");
      break;
    case Experiment::sensing_sweep:
    case Experiment::sensitivity_table:
      need(!c.sweep.b_ac.empty(), "sweep.b_ac_uT", "needs a b_ac_uT grid");
      need(!c.sweep.sensing_time.empty(), "sweep.sensing_time_us", "needs a sensing_time_us grid");
      if (c.experiment == Experiment::sensitivity_table) {
        need(c.sweep.b_ac.size() >= 5, "sweep.b_ac_uT", "sensitivity needs at least 5 field values");
      }
      break;
    case Experiment::coherence_fit:
      need(!c.coherence.data_path.empty() || c.coherence.synthetic.has_value(), "coherence",
           "needs coherence.data_path or coherence.synthetic");
      break;
  }

  if (!r.ok()) return std::nullopt;
  return c;
}

std::optional<RunConfig> load_config(const std::string& path, ValidationReport& r) {
  std::ifstream in(path);
  if (!in) {
    r.errors.push_back({path, "cannot open file"});
    return std::nullopt;
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    r.errors.push_back({path, std::string("JSON syntax error: ") + e.what()});
    return std::nullopt;
  }
  return parse_config(j, r);
}

}  // namespace dfreeze::harness
