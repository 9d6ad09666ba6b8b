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

#include "dfreeze/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dfreeze/error.hpp"
#include "dfreeze/units.hpp"

namespace dfreeze {

using units::kPi;
using units::kTwoPi;

double AcDrive::at(double t) const {
  return amplitude * std::cos(frequency * t + phase);
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::ideal_toggle: return "ideal_toggle";
    case ScheduleKind::with_dd_train: return "with_dd_train";
    case ScheduleKind::sensing_df: return "sensing_df";
    case ScheduleKind::sensing_pdd: return "sensing_pdd";
  }
  return "unknown";
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
  for (auto k : {ScheduleKind::ideal_toggle, ScheduleKind::with_dd_train,
                 ScheduleKind::sensing_df, ScheduleKind::sensing_pdd}) {
    if (to_string(k) == name) return k;
  }
  throw PreconditionError("unknown schedule kind '" + name + "'");
}

double FloquetSchedule::period() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

void FloquetSchedule::validate() const {
  if (segments.empty()) throw ConstructionError("schedule has no segments");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!(s.duration > 0.0)) {
      std::ostringstream msg;
      msg << "segment " << i << " has non-positive duration " << s.duration;
      throw ConstructionError(msg.str());
    }
    if (s.kind == SegmentKind::pi_pulse && std::abs(s.rabi * s.duration - kPi) > 1e-9) {
      std::ostringstream msg;
      msg << "pi_pulse segment " << i << " rotates by " << s.rabi * s.duration
          << " rad instead of pi";
      throw ConstructionError(msg.str());
    }
  }
}

FloquetSchedule FloquetSchedule::reversed() const {
  FloquetSchedule r = *this;
  std::reverse(r.segments.begin(), r.segments.end());
  return r;
}

namespace {

// Pulse axis pattern x, x, -x, -x.
double pulse_phase(int index) { return (index % 4) < 2 ? 0.0 : kPi; }

DriveSegment free_segment(double duration, const ScheduleParams& p, double sign_f,
                          int parity, double ac_sign) {
  DriveSegment s;
  s.duration = duration;
  s.rabi = p.rabi;
  // A pi pulse about x flips Sy and Sz, so the lab-frame detuning and the
  // y component of the drive carry the current pulse parity.
  s.detuning = parity * sign_f * p.detuning;
  s.phase = parity > 0 ? p.phase : -p.phase;
  s.ac_sign = ac_sign;
  return s;
}

DriveSegment pulse_segment(double t_pi, int index, double ac_sign) {
  DriveSegment s;
  s.duration = t_pi;
  s.rabi = kPi / t_pi;
  s.phase = pulse_phase(index);
  s.kind = SegmentKind::pi_pulse;
  s.ac_sign = ac_sign;
  return s;
}

void require_timing(const ScheduleParams& p) {
  if (!(p.tau > 0.0) || !(p.t_pi > 0.0)) {
    throw ConstructionError("pulse train needs tau > 0 and t_pi > 0");
  }
}

FloquetSchedule toggle(const ScheduleParams& p) {
  if (!(p.period > 0.0)) throw ConstructionError("period must be positive");
  FloquetSchedule s;
  s.kind = ScheduleKind::ideal_toggle;
  s.segments.push_back(free_segment(p.period / 2, p, +1.0, +1, 0.0));
  s.segments.push_back(free_segment(p.period / 2, p, -1.0, +1, 0.0));
  return s;
}

FloquetSchedule dd_train(const ScheduleParams& p) {
  require_timing(p);
  const double half = p.period / 2;
  const double slot = 2 * p.tau + p.t_pi;
  int m = static_cast<int>(std::floor(half / slot + 1e-12));
  m -= m % 2;
  if (m < 2) {
    throw ConstructionError("with_dd_train: half period too short for two pulses");
  }
  const double edge = (half - m * p.t_pi - (m - 1) * 2 * p.tau) / 2;
  FloquetSchedule s;
  s.kind = ScheduleKind::with_dd_train;
  int pulse = 0;
  for (double sign_f : {+1.0, -1.0}) {
    int parity = +1;
    for (int k = 0; k < m; ++k) {
      s.segments.push_back(free_segment(k == 0 ? edge : 2 * p.tau, p, sign_f, parity, 0.0));
      s.segments.push_back(pulse_segment(p.t_pi, pulse++, 0.0));
      parity = -parity;
    }
    s.segments.push_back(free_segment(edge, p, sign_f, parity, 0.0));
  }
  return s;
}

FloquetSchedule df_sensing(const ScheduleParams& p) {
  require_timing(p);
  if (!(p.tau > p.t_pi / 2)) {
    throw ConstructionError("sensing_df: tau must exceed t_pi / 2");
  }
  const double slot = 2 * p.tau + p.t_pi;
  const int m = std::max(1, static_cast<int>(std::lround(p.period / 2 / slot)));
  const double edge = p.tau - p.t_pi / 2;
  FloquetSchedule s;
  s.kind = ScheduleKind::sensing_df;
  int pulse = 0;
  int parity = +1;
  for (double sign_f : {+1.0, -1.0}) {
    for (int k = 0; k < m; ++k) {
      s.segments.push_back(free_segment(k == 0 ? edge : 2 * p.tau, p, sign_f, parity, 1.0));
      s.segments.push_back(pulse_segment(p.t_pi, pulse++, 1.0));
      parity = -parity;
    }
    s.segments.push_back(free_segment(edge, p, sign_f, parity, 1.0));
    // Extra Floquet pulse closing each half period.
    s.segments.push_back(pulse_segment(p.t_pi, pulse++, 1.0));
    parity = -parity;
  }
  return s;
}

FloquetSchedule pdd_sensing(const ScheduleParams& p) {
  require_timing(p);
  if (p.pdd_cycles < 1) throw ConstructionError("sensing_pdd: pdd_cycles must be >= 1");
  ScheduleParams bare = p;
  bare.rabi = 0.0;
  bare.detuning = 0.0;
  FloquetSchedule s;
  s.kind = ScheduleKind::sensing_pdd;
  int pulse = 0;
  for (int c = 0; c < p.pdd_cycles; ++c) {
    for (int k = 0; k < 4; ++k) {
      s.segments.push_back(free_segment(k == 0 ? p.tau : 2 * p.tau, bare, 1.0, 1, 1.0));
      s.segments.push_back(pulse_segment(p.t_pi, pulse++, 1.0));
    }
    s.segments.push_back(free_segment(p.tau, bare, 1.0, 1, 1.0));
  }
  return s;
}

}  // namespace

FloquetSchedule build_schedule(ScheduleKind kind, const ScheduleParams& p) {
  FloquetSchedule s;
  switch (kind) {
    case ScheduleKind::ideal_toggle: s = toggle(p); break;
    case ScheduleKind::with_dd_train: s = dd_train(p); break;
    case ScheduleKind::sensing_df: s = df_sensing(p); break;
    case ScheduleKind::sensing_pdd: s = pdd_sensing(p); break;
  }
  s.validate();
  if (kind == ScheduleKind::ideal_toggle || kind == ScheduleKind::with_dd_train) {
    if (std::abs(s.period() - p.period) > 1e-9 * std::max(1.0, p.period)) {
      throw ConstructionError("segments do not tile the requested period");
    }
  }
  return s;
}

std::vector<TimelinePiece> expand_period(const FloquetSchedule& schedule,
                                         bool instantaneous_pulses) {
  std::vector<TimelinePiece> out;
  out.reserve(schedule.segments.size() * 3);
  for (int i = 0; i < static_cast<int>(schedule.segments.size()); ++i) {
    const auto& s = schedule.segments[i];
    if (s.kind == SegmentKind::pi_pulse && instantaneous_pulses) {
      out.push_back({i, s.duration / 2, false, false});
      out.push_back({i, 0.0, false, true});
      out.push_back({i, s.duration / 2, false, false});
    } else {
      out.push_back({i, s.duration, true, false});
    }
  }
  return out;
}

std::vector<double> freezing_points(double period, int k_max) {
  if (!(period > 0.0)) throw PreconditionError("freezing_points: T must be positive");
  if (k_max < 1) throw PreconditionError("freezing_points: k_max must be >= 1");
  std::vector<double> h;
  for (int k = 1; k <= k_max; ++k) h.push_back(kTwoPi * 2.0 * k / period);
  return h;
}

bool at_freezing_point(double h_z, double period, double tol) {
  const double x = h_z * period / (4 * kPi);
  const double k = std::round(x);
  return k != 0.0 && std::abs(x - k) <= tol;
}

namespace {

// sin(x) and 1 - cos(x) after reducing x to [-pi, pi].
std::pair<double, double> reduced_sin_vers(double x) {
  const double r = x - kTwoPi * std::round(x / kTwoPi);
  const double s = std::sin(r / 2);
  return {std::sin(r), 2 * s * s};
}

void require_freezing(double h_z, double period, const char* who) {
  if (!at_freezing_point(h_z, period)) {
    std::ostringstream msg;
    msg << who << ": h_z T / (4 pi) = " << h_z * period / (4 * kPi)
        << " is not a nonzero integer; the formula holds only at freezing points";
    throw PreconditionError(msg.str());
  }
}

}  // namespace

EffectiveHamiltonianCoeffs effective_hamiltonian(double omega, double h_z,
                                                 double period) {
  if (h_z == 0.0) return {omega, 0.0, true};
  const auto [s, v] = reduced_sin_vers(h_z * period / 2);
  const double pref = 2 * omega / (h_z * period);
  return {pref * s, -pref * v, true};
}

double symmetry_breaking_scale(double omega, double h_z) {
  if (h_z == 0.0) throw DomainError("symmetry_breaking_scale: h_z must be nonzero");
  return omega * omega * omega / (4 * h_z * h_z);
}

Eigen::Vector2d kick_operator(double t, double omega, double h_z, double period) {
  require_freezing(h_z, period, "kick_operator");
  if (t < -1e-12 * period || t > period * (1 + 1e-12)) {
    throw PreconditionError("kick_operator: t must lie in [0, T]");
  }
  const auto [s, v] = reduced_sin_vers(h_z * t);
  const double a = omega / h_z;
  const double sign = t <= period / 2 ? -1.0 : 1.0;
  return {a * s, sign * a * v};
}

Eigen::Vector3d micromotion_prediction(double t_star, double omega, double h_z,
                                       double sz, double period) {
  require_freezing(h_z, period, "micromotion_prediction");
  if (std::abs(sz) > 1.0) throw PreconditionError("micromotion_prediction: |sz| must be <= 1");
  if (t_star < -1e-12 * period || t_star > period * (1 + 1e-12)) {
    throw PreconditionError("micromotion_prediction: t* must lie in [0, T]");
  }
  const auto [s, v] = reduced_sin_vers(h_z * t_star);
  const double a = omega / h_z;
  const double sign = t_star < period / 2 ? 1.0 : -1.0;
  return {sign * a * sz * v, -a * sz * s, sz * (1 - a * a * v)};
}

}  // namespace dfreeze
