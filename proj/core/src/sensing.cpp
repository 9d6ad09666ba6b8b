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

#include "dfreeze/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dfreeze/error.hpp"

namespace dfreeze::sensing {

using units::kPi;
using units::kTwoPi;

AcDrive AcField::as_drive() const {
  return {gamma * amplitude_ut, kTwoPi * frequency_mhz, phase};
}

std::string to_string(Protocol p) { return p == Protocol::df ? "DF" : "PDD"; }
std::string to_string(Backend b) { return b == Backend::ed ? "ed" : "dtwa"; }
std::string to_string(Mode m) {
  return m == Mode::ideal_rectification ? "ideal_rectification" : "explicit_pulses";
}
std::string to_string(Region r) {
  switch (r) {
    case Region::all: return "all";
    case Region::near_freezing: return "near_freezing";
    case Region::away: return "away";
  }
  return "unknown";
}

double filter_center_frequency(double tau, double t_pi) {
  if (!(tau > 0.0) || !(t_pi >= 0.0)) {
    throw PreconditionError("filter_center_frequency: need tau > 0 and t_pi >= 0");
  }
  return 1.0 / (4 * tau + 2 * t_pi);
}

double SensingSequence::filter_frequency_mhz() const { return filter_center_frequency(tau, t_pi); }

double SensingSequence::effective_t_prime() const { return t_prime > 0.0 ? t_prime : period; }

FloquetSchedule SensingSequence::explicit_schedule(const AcField& field) const {
  ScheduleParams p;
  p.period = period;
  p.rabi = rabi;
  p.detuning = detuning;
  p.tau = tau;
  p.t_pi = t_pi;
  FloquetSchedule s = build_schedule(
      protocol == Protocol::df ? ScheduleKind::sensing_df : ScheduleKind::sensing_pdd, p);
  s.ac = field.as_drive();
  return s;
}

double rectified_detuning(const AcField& field) {
  return 2.0 / kPi * field.gamma * field.amplitude_ut;
}

std::vector<double> ac_freezing_amplitudes(double t_prime, int k_max, double gamma) {
  if (!(t_prime > 0.0)) throw PreconditionError("ac_freezing_amplitudes: T' must be positive");
  if (k_max < 1) throw PreconditionError("ac_freezing_amplitudes: k_max must be >= 1");
  std::vector<double> b;
  for (int k = 1; k <= k_max; ++k) b.push_back(4 * kPi * k * kPi / (2 * gamma * t_prime));
  return b;
}

double sensing_response_coefficient(double omega, double h_z, double b_ac, double gamma) {
  if (h_z == 0.0) {
    throw DomainError("sensing_response_coefficient: h_z = 0; simulate the response directly");
  }
  return omega / h_z * (2 * gamma * b_ac / kPi);
}

std::vector<Response> simulate_sensing(const SensingSequence& seq, const AcField& field,
                                       const SpinEnsemble& ensemble, const Options& opt,
                                       const std::vector<double>& sensing_times) {
  if (!std::is_sorted(sensing_times.begin(), sensing_times.end())) {
    throw PreconditionError("simulate_sensing: sensing times must be sorted");
  }
  FloquetSchedule sched;
  if (opt.mode == Mode::explicit_pulses) {
    sched = seq.explicit_schedule(field);
  } else if (seq.protocol == Protocol::df) {
    ScheduleParams p;
    p.period = seq.period;
    p.rabi = seq.rabi;
    p.detuning = seq.detuning + rectified_detuning(field);
    sched = build_schedule(ScheduleKind::ideal_toggle, p);
  } else {
    // Rectified phase accumulated as a static detuning on every spin.
    sched.kind = ScheduleKind::sensing_pdd;
    DriveSegment s;
    s.duration = 8 * seq.tau + 4 * seq.t_pi;
    s.detuning = rectified_detuning(field);
    sched.segments.push_back(s);
  }

  const ProductState init = seq.protocol == Protocol::df ? initial_state(0.0, 0.0)
                                                         : initial_state(kPi / 2, 0.0);
  const int comp = seq.protocol == Protocol::df ? 2 : 0;

  MagnetizationSeries series;
  if (opt.backend == Backend::ed) {
    series = ed::evolve(ed::product_state(ensemble.size(), init), ensemble, sched,
                        sensing_times, opt.ed);
  } else {
    const auto batch = dtwa::sample_initial(init, ensemble.size(), opt.n_traj, opt.seed, opt.frames);
    series = dtwa::evolve(batch, ensemble, sched, sensing_times, opt.dtwa);
  }

  std::vector<Response> out;
  out.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    Response r;
    r.sensing_time = series.times[i];
    r.value = series.m[i][comp];
    r.stderr_value = series.stderr_m[i][comp];
    r.phase = std::atan2(series.m[i].y(), series.m[i].x());
    out.push_back(r);
  }
  return out;
}

Response simulate_sensing(const SensingSequence& seq, const AcField& field,
                          const SpinEnsemble& ensemble, const Options& opt) {
  return simulate_sensing(seq, field, ensemble, opt, {seq.sensing_time}).front();
}

double rectification_efficiency(const SensingSequence& seq, double frequency_mhz,
                                double alpha) {
  const FloquetSchedule s = seq.explicit_schedule(AcField{});
  // Rectification window: one 4-pulse PDD cycle, or the first DF half period.
  double window = s.period();
  if (seq.protocol == Protocol::df) window /= 2;
  const double w = kTwoPi * frequency_mhz;
  const int q = 64;  // Simpson intervals per segment
  double integral = 0.0;
  double t0 = 0.0;
  double parity = 1.0;
  for (const auto& seg : s.segments) {
    if (t0 >= window - 1e-12) break;
    const double d = std::min(seg.duration, window - t0);
    const bool pulse = seg.kind == SegmentKind::pi_pulse;
    auto f = [&](double u) {
      const double sign = pulse ? parity * std::cos(kPi * u / seg.duration) : parity;
      return sign * std::cos(w * (t0 + u) + alpha);
    };
    const double h = d / q;
    double acc = f(0.0) + f(d);
    for (int k = 1; k < q; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(k * h);
    integral += acc * h / 3.0;
    if (pulse && d >= seg.duration - 1e-12) parity = -parity;
    t0 += seg.duration;
  }
  return integral / window / (2.0 / kPi);
}

double optimal_ac_phase(const SensingSequence& seq, double frequency_mhz, int n_scan) {
  if (n_scan < 4) throw PreconditionError("optimal_ac_phase: n_scan must be >= 4");
  auto eff = [&](double a) { return rectification_efficiency(seq, frequency_mhz, a); };
  double best = -kPi, best_v = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_scan; ++k) {
    const double a = -kPi + kTwoPi * (k + 1) / n_scan;
    const double v = eff(a);
    if (v > best_v) {
      best_v = v;
      best = a;
    }
  }
  double lo = best - kTwoPi / n_scan, hi = best + kTwoPi / n_scan;
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = eff(c), fd = eff(d);
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = eff(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = eff(d);
    }
  }
  double a = std::remainder(0.5 * (lo + hi), kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  return a;
}

void PddBudget::validate() const {
  if (!(t2 > 0 && alpha > 0 && readout_efficiency > 0 && t_init >= 0 && t_readout >= 0 &&
        t_delay >= 0)) {
    throw PreconditionError("PddBudget: T2, alpha, C must be positive and overheads non-negative");
  }
}

double pdd_theoretical_sensitivity(double ts, const PddBudget& b, double gamma) {
  b.validate();
  if (!(ts > 0.0)) throw PreconditionError("pdd_theoretical_sensitivity: T_s must be positive");
  return kPi / (2 * gamma) * std::exp(std::pow(ts / b.t2, b.alpha)) / b.readout_efficiency *
         std::sqrt(ts + b.overhead()) / ts;
}

SensitivityEstimate sensitivity_from_curve(const std::vector<CurvePoint>& curve, double ts,
                                           const PddBudget& overheads,
                                           const SensitivityOptions& opt) {
  const std::size_t N = curve.size();
  if (N < 5) throw PreconditionError("sensitivity_from_curve: need at least 5 points");
  for (std::size_t i = 1; i < N; ++i) {
    if (!(curve[i].b_ac > curve[i - 1].b_ac)) {
      throw PreconditionError("sensitivity_from_curve: B_ac must be strictly increasing");
    }
  }
  std::vector<double> smooth(N, 0.0);
  for (std::size_t i = 1; i + 1 < N; ++i) {
    smooth[i] = (curve[i - 1].mean + curve[i].mean + curve[i + 1].mean) / 3.0;
  }
  auto in_region = [&](double b) {
    if (opt.region == Region::all) return true;
    bool near = false;
    for (double bk : opt.freezing_amplitudes) {
      near = near || std::abs(b - bk) <= opt.near_halfwidth || std::abs(b + bk) <= opt.near_halfwidth;
    }
    return opt.region == Region::near_freezing ? near : !near;
  };

  SensitivityEstimate est;
  est.ts = ts;
  std::size_t best = N;
  for (std::size_t i = 2; i + 2 < N; ++i) {
    if (!in_region(curve[i].b_ac)) continue;
    const double slope = (smooth[i + 1] - smooth[i - 1]) / (curve[i + 1].b_ac - curve[i - 1].b_ac);
    if (best == N || std::abs(slope) > std::abs(est.slope)) {
      best = i;
      est.slope = slope;
    }
  }
  const double tt_us = (ts + overheads.overhead()) * opt.n_trials;
  est.total_time_s = tt_us * 1e-6;
  if (best == N || est.slope == 0.0) {
    est.infinite = true;
    est.eta = std::numeric_limits<double>::infinity();
    return est;
  }
  est.sigma_s = curve[best].sigma;
  est.b_at_optimum = curve[best].b_ac;
  // uT sqrt(us) equals nT / sqrt(Hz).
  est.eta = est.sigma_s * std::sqrt(tt_us) / std::abs(est.slope) * units::kUtSqrtUsToNtPerSqrtHz;
  return est;
}

}  // namespace dfreeze::sensing
