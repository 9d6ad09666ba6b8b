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

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "dfreeze/error.hpp"
#include "dfreeze/fit.hpp"
#include "dfreeze/harness/runner.hpp"
#include "dfreeze/serialize.hpp"
#include "dfreeze/spectrum.hpp"

namespace dfreeze::harness {

namespace {

using units::kTwoPi;

// Fixed numeric formatting keeps reruns byte-identical.
class Row {
 public:
  template <class T>
  Row& operator<<(const T& v) {
    if (n_++) os_ << ',';
    if constexpr (std::is_floating_point_v<T>) {
      if (std::isfinite(v)) {
        os_ << v;
      } else {
        os_ << (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
      }
    } else {
      os_ << v;
    }
    return *this;
  }
  std::string str() const { return os_.str() + '\n'; }
  Row() { os_.precision(12); }

 private:
  std::ostringstream os_;
  int n_ = 0;
};

double mhz(double angular) { return units::angular_to_mhz(angular); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SpinEnsemble make_ensemble(const RunConfig& c, std::uint64_t seed) {
  if (!c.ensemble.path.empty()) return ensemble_from_json(read_file(c.ensemble.path));
  EnsembleParams p;
  p.n = c.ensemble.n;
  p.density = c.ensemble.density;
  p.min_distance = c.ensemble.min_distance;
  p.disorder_width = c.ensemble.disorder_width;
  p.seed = seed;
  return sample_ensemble(p);
}

FloquetSchedule make_schedule(const RunConfig& c, double rabi, double detuning) {
  ScheduleParams p;
  p.period = c.schedule.period;
  p.rabi = rabi;
  p.detuning = detuning;
  p.phase = c.schedule.phase;
  p.tau = c.schedule.tau;
  p.t_pi = c.schedule.t_pi;
  p.pdd_cycles = c.schedule.pdd_cycles;
  return build_schedule(c.schedule.kind, p);
}

double default_detuning(const RunConfig& c) {
  return c.schedule.detuning ? *c.schedule.detuning : freezing_points(c.schedule.period, 1)[0];
}

MagnetizationSeries evolve_series(const RunConfig& c, const SpinEnsemble& e, const FloquetSchedule& s,
                                  const std::vector<double>& times, int threads) {
  if (c.backend == sensing::Backend::ed) {
    return ed::evolve(ed::product_state(e.size(), c.initial), e, s, times);
  }
  const auto batch = dtwa::sample_initial(c.initial, e.size(), c.dtwa.n_traj, *c.trajectory_seed);
  dtwa::Options o;
  o.dt = c.dtwa.dt;
  o.batch_size = c.dtwa.batch_size;
  o.threads = threads;
  return dtwa::evolve(batch, e, s, times, o);
}

std::vector<double> time_grid(double period, int periods, int spp) {
  std::vector<double> t;
  for (long k = 0; k <= static_cast<long>(periods) * spp; ++k) t.push_back(period * k / spp);
  return t;
}

std::string seed_id(std::uint64_t s) { return "seed" + std::to_string(s); }

// ---- freezing_spectrum -----------------------------------------------------

ExperimentPlan plan_freezing(const RunConfig& c, int threads) {
  ExperimentPlan plan;
  plan.csv_headers["freezing_grid.csv"] = "seed,hT_over_2pi,detuning_MHz,time_us,mz,mz_stderr";
  plan.csv_headers["freezing_average.csv"] = "seed,hT_over_2pi,detuning_MHz,cumulative_mz";
  const double T = c.schedule.period;
  std::vector<double> h;
  for (double x : c.sweep.h_t_over_2pi) h.push_back(kTwoPi * x / T);
  for (double d : c.sweep.detuning) h.push_back(d);
  for (auto seed : c.ensemble_seeds) {
    for (double hz : h) {
      Job job;
      std::ostringstream id;
      id << seed_id(seed) << "/h=" << mhz(hz) << "MHz";
      job.id = id.str();
      job.run = [&c, seed, hz, T, threads](JobResult& r) {
        const auto e = make_ensemble(c, seed);
        const auto t = time_grid(T, c.evolution.periods, c.evolution.samples_per_period);
        const auto s = evolve_series(c, e, make_schedule(c, c.schedule.rabi, hz), t, threads);
        const double x = hz * T / kTwoPi;
        std::string grid;
        for (std::size_t i = 0; i < s.size(); ++i) {
          grid += (Row() << seed << x << mhz(hz) << s.times[i] << s.m[i].z() << s.stderr_m[i].z()).str();
        }
        r.rows["freezing_grid.csv"] = grid;
        r.rows["freezing_average.csv"] =
            (Row() << seed << x << mhz(hz) << cumulative_time_average(s, s.times.back())).str();
      };
      plan.jobs.push_back(std::move(job));
    }
  }
  return plan;
}

// ---- micromotion -----------------------------------------------------------

ExperimentPlan plan_micromotion(const RunConfig& c, int threads) {
  ExperimentPlan plan;
  plan.csv_headers["micromotion_spectrum.csv"] = "seed,component,frequency_MHz,amplitude";
  for (auto seed : c.ensemble_seeds) {
    Job job;
    job.id = seed_id(seed);
    job.run = [&c, seed, threads](JobResult& r) {
      const double T = c.schedule.period, h = default_detuning(c);
      const auto e = make_ensemble(c, seed);
      const auto t = time_grid(T, c.evolution.periods, c.evolution.samples_per_period);
      const auto s = evolve_series(c, e, make_schedule(c, c.schedule.rabi, h), t, threads);
      std::ostringstream csv;
      write_csv(csv, s);
      r.files["micromotion_series_" + seed_id(seed) + ".csv"] = csv.str();

      const double t0 = c.evolution.window_start, t1 = c.evolution.window_stop;
      nlohmann::json peaks;
      std::string rows;
      const char* names[] = {"mx", "my", "mz"};
      for (int comp = 0; comp < 3; ++comp) {
        const auto sp = spectrum(s, comp, t0, t1);
        for (std::size_t k = 0; k < sp.frequency_mhz.size(); ++k) {
          rows += (Row() << seed << names[comp] << sp.frequency_mhz[k] << sp.amplitude[k]).str();
        }
        nlohmann::json list = nlohmann::json::array();
        for (std::size_t k = 0; k < std::min<std::size_t>(3, sp.peaks.size()); ++k) {
          list.push_back({{"frequency_MHz", sp.peaks[k].frequency_mhz}, {"amplitude", sp.peaks[k].amplitude}});
        }
        peaks["peaks"][names[comp]] = list;
        peaks["bin_width_MHz"] = sp.bin_width_mhz;
      }
      r.rows["micromotion_spectrum.csv"] = rows;

      double acc = 0.0;
      int cnt = 0;
      const auto st = s.stroboscopic(T);
      for (std::size_t i = 0; i < st.size(); ++i) {
        if (st.times[i] >= t0 - 1e-9 && st.times[i] < t1 - 1e-9) acc += st.m[i].z(), ++cnt;
      }
      const double sz = cnt ? acc / cnt : std::numeric_limits<double>::quiet_NaN();
      peaks["seed"] = seed;
      peaks["drive_frequency_MHz"] = 1.0 / T;
      peaks["stroboscopic_mz"] = sz;
      if (at_freezing_point(h, T) && std::isfinite(sz)) {
        const double ratio = c.schedule.rabi / h;
        peaks["predicted"] = {{"my_amplitude", ratio * std::abs(sz)},
                              {"mz_amplitude", ratio * ratio * std::abs(sz)},
                              {"mx_peak_to_peak", 4 * ratio * std::abs(sz)}};
      }
      r.files["micromotion_peaks_" + seed_id(seed) + ".json"] = peaks.dump(2) + "\n";
    };
    plan.jobs.push_back(std::move(job));
  }
  return plan;
}

// ---- long_time_decay -------------------------------------------------------

ExperimentPlan plan_decay(const RunConfig& c, int threads) {
  ExperimentPlan plan;
  plan.csv_headers["decay_series.csv"] = "seed,rabi_MHz,detuning_MHz,period,time_us,mz,mz_stderr";
  plan.csv_headers["decay_summary.csv"] = "seed,rabi_MHz,detuning_MHz,symmetry_breaking_MHz,half_time_us";
  for (auto seed : c.ensemble_seeds) {
    for (double w : c.sweep.rabi) {
      for (double h : c.sweep.detuning) {
        Job job;
        std::ostringstream id;
        id << seed_id(seed) << "/rabi=" << mhz(w) << "MHz/h=" << mhz(h) << "MHz";
        job.id = id.str();
        job.run = [&c, seed, w, h, threads](JobResult& r) {
          const double T = c.schedule.period;
          const auto e = make_ensemble(c, seed);
          const auto s = evolve_series(c, e, make_schedule(c, w, h), time_grid(T, c.evolution.periods, 1), threads);
          std::string rows;
          double half = std::numeric_limits<double>::infinity();
          for (std::size_t k = 0; k < s.size(); ++k) {
            rows += (Row() << seed << mhz(w) << mhz(h) << k << s.times[k] << s.m[k].z() << s.stderr_m[k].z()).str();
            if (k > 0 && !std::isfinite(half) && s.m[k].z() <= 0.5) {
              const double a = s.m[k - 1].z(), b = s.m[k].z();
              half = s.times[k - 1] + (a - 0.5) / (a - b) * (s.times[k] - s.times[k - 1]);
            }
          }
          r.rows["decay_series.csv"] = rows;
          const double sb = h != 0.0 ? mhz(symmetry_breaking_scale(w, h)) : std::numeric_limits<double>::quiet_NaN();
          r.rows["decay_summary.csv"] = (Row() << seed << mhz(w) << mhz(h) << sb << half).str();
        };
        plan.jobs.push_back(std::move(job));
      }
    }
  }
  return plan;
}

// ---- sensing_sweep / sensitivity_table ----------------------------------------

sensing::SensingSequence make_sequence(const RunConfig& c) {
  sensing::SensingSequence q;
  q.protocol = c.sensing.protocol;
  q.tau = c.schedule.tau;
  q.t_pi = c.schedule.t_pi;
  q.period = c.schedule.period;
  q.rabi = c.schedule.rabi;
  q.detuning = c.schedule.detuning.value_or(0.0);
  q.t_prime = c.sensing.t_prime;
  return q;
}

sensing::AcField make_field(const RunConfig& c, const sensing::SensingSequence& q, double b) {
  sensing::AcField f;
  f.amplitude_ut = b;
  f.frequency_mhz = c.sensing.frequency_mhz.value_or(q.filter_frequency_mhz());
  f.phase = c.sensing.phase ? *c.sensing.phase
                            : (c.sensing.mode == sensing::Mode::explicit_pulses ? sensing::optimal_ac_phase(q, f.frequency_mhz)
                                                                                : 0.0);
  return f;
}

ExperimentPlan plan_sensing(const RunConfig& c, int threads, bool table) {
  ExperimentPlan plan;
  plan.csv_headers["sensing_response.csv"] = "seed,b_ac_uT,sensing_time_us,value,stderr,phase_rad";
  for (auto seed : c.ensemble_seeds) {
    for (double b : c.sweep.b_ac) {
      Job job;
      std::ostringstream id;
      id << seed_id(seed) << "/B=" << b << "uT";
      job.id = id.str();
      job.run = [&c, seed, b, threads](JobResult& r) {
        const auto e = make_ensemble(c, seed);
        const auto q = make_sequence(c);
        sensing::Options o;
        o.backend = c.backend;
        o.mode = c.sensing.mode;
        o.n_traj = c.dtwa.n_traj;
        o.seed = c.trajectory_seed.value_or(0);
        o.dtwa.dt = c.dtwa.dt;
        o.dtwa.batch_size = c.dtwa.batch_size;
        o.dtwa.threads = threads;
        const auto res = sensing::simulate_sensing(q, make_field(c, q, b), e, o, c.sweep.sensing_time);
        std::string rows;
        for (const auto& x : res) rows += (Row() << seed << b << x.sensing_time << x.value << x.stderr_value << x.phase).str();
        r.rows["sensing_response.csv"] = rows;
      };
      plan.jobs.push_back(std::move(job));
    }
  }
  if (!table) return plan;

  plan.csv_headers["sensitivity.csv"] = "sensing_time_us,region,eta_nT_per_sqrtHz,slope_per_uT,sigma,b_opt_uT";
  plan.csv_headers["pdd_theory.csv"] = "sensing_time_us,eta_nT_per_sqrtHz";
  plan.reduce = [&c](const std::vector<JobResult>& jobs, JobResult& out) {
    // Seed-averaged curves. Readout noise per point follows sigma = 1/(C sqrt(N)).
    const std::size_t nb = c.sweep.b_ac.size(), nt = c.sweep.sensing_time.size();
    std::vector<std::vector<double>> mean(nt, std::vector<double>(nb, 0.0));
    const double ns = static_cast<double>(c.ensemble_seeds.size());
    std::size_t j = 0;
    for (std::size_t si = 0; si < c.ensemble_seeds.size(); ++si) {
      for (std::size_t bi = 0; bi < nb; ++bi, ++j) {
        std::istringstream rows(jobs[j].rows.at("sensing_response.csv"));
        std::string line;
        for (std::size_t ti = 0; ti < nt && std::getline(rows, line); ++ti) {
          std::istringstream f(line);
          std::string cell;
          for (int k = 0; k < 4; ++k) std::getline(f, cell, ',');
          mean[ti][bi] += std::stod(cell) / ns;
        }
      }
    }
    const auto q = make_sequence(c);
    const double sigma = 1.0 / (c.sensing.budget.readout_efficiency * std::sqrt(c.sensing.n_trials));
    sensing::SensitivityOptions so;
    so.freezing_amplitudes = sensing::ac_freezing_amplitudes(q.effective_t_prime(), 3);
    so.near_halfwidth = c.sensing.near_halfwidth;
    so.n_trials = c.sensing.n_trials;
    std::string rows, theory;
    for (std::size_t ti = 0; ti < nt; ++ti) {
      std::vector<sensing::CurvePoint> curve;
      for (std::size_t bi = 0; bi < nb; ++bi) curve.push_back({c.sweep.b_ac[bi], mean[ti][bi], sigma});
      for (auto region : {sensing::Region::all, sensing::Region::near_freezing, sensing::Region::away}) {
        so.region = region;
        const auto est = sensing::sensitivity_from_curve(curve, c.sweep.sensing_time[ti], c.sensing.budget, so);
        rows += (Row() << c.sweep.sensing_time[ti] << sensing::to_string(region) << est.eta << est.slope
                       << est.sigma_s << est.b_at_optimum).str();
      }
      theory += (Row() << c.sweep.sensing_time[ti]
                       << sensing::pdd_theoretical_sensitivity(c.sweep.sensing_time[ti], c.sensing.budget)).str();
    }
    out.rows["sensitivity.csv"] = rows;
    out.rows["pdd_theory.csv"] = theory;
  };
  return plan;
}

// ---- coherence_fit ---------------------------------------------------------

ExperimentPlan plan_coherence(const RunConfig& c) {
  ExperimentPlan plan;
  plan.csv_headers["coherence_data.csv"] = "t_us,value,model";
  Job job;
  job.id = "coherence";
  job.run = [&c](JobResult& r) {
    std::vector<double> t, y;
    if (c.coherence.synthetic) {
      const auto& s = *c.coherence.synthetic;
      std::mt19937_64 rng(*c.trajectory_seed);
      std::normal_distribution<double> noise(0.0, s.noise);
      for (int i = 0; i < s.n_points; ++i) {
        const double x = s.n_points > 1 ? s.t_min + (s.t_max - s.t_min) * i / (s.n_points - 1) : s.t_min;
        t.push_back(x);
        y.push_back(std::exp(-std::pow(x / s.t2, s.alpha)) + (s.noise > 0 ? noise(rng) : 0.0));
      }
    } else {
      std::istringstream in(read_file(c.coherence.data_path));
      std::string line;
      std::getline(in, line);  // header
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream f(line);
        std::string a, b;
        std::getline(f, a, ',');
        std::getline(f, b, ',');
        t.push_back(std::stod(a));
        y.push_back(std::stod(b));
      }
    }
    const auto fit = fit_stretched_exponential(t, y, c.coherence.fixed_alpha);
    r.files["coherence_fit.json"] = fit_to_json(fit) + "\n";
    const double t2 = fit.value("T2"), al = fit.value("alpha");
    std::string rows;
    for (std::size_t i = 0; i < t.size(); ++i) rows += (Row() << t[i] << y[i] << std::exp(-std::pow(t[i] / t2, al))).str();
    r.rows["coherence_data.csv"] = rows;
  };
  plan.jobs.push_back(std::move(job));
  return plan;
}

}  // namespace

ExperimentPlan plan_experiment(const RunConfig& c) {
  // DTWA runs inside a job use one thread; the job pool supplies parallelism.
  const int threads = 1;
  switch (c.experiment) {
    case Experiment::freezing_spectrum: return plan_freezing(c, threads);
    case Experiment::micromotion: return plan_micromotion(c, threads);
    case Experiment::long_time_decay: return plan_decay(c, threads);
    case Experiment::sensing_sweep: return plan_sensing(c, threads, false);
    case Experiment::sensitivity_table: return plan_sensing(c, threads, true);
    case Experiment::coherence_fit: return plan_coherence(c);
  }
  throw PreconditionError("plan_experiment: unknown experiment");
}

}  // namespace dfreeze::harness
