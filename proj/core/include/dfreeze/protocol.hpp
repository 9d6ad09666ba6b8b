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

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dfreeze {

enum class SegmentKind { continuous, pi_pulse };

/// Piecewise-constant drive: H = H0 + rabi (cos(phase) Sx + sin(phase) Sy)
/// + detuning Sz + ac_sign * delta_ac(t) Sz.
struct DriveSegment {
  double duration = 0.0;  // us
  double rabi = 0.0;      // rad/us
  double detuning = 0.0;  // rad/us
  double phase = 0.0;     // rad
  SegmentKind kind = SegmentKind::continuous;
  // Multiplier of the schedule's ac detuning during this segment.
  double ac_sign = 0.0;
};

/// Oscillating detuning delta_ac(t) = amplitude cos(frequency t + phase),
/// with t the absolute evolution time.
struct AcDrive {
  double amplitude = 0.0;  // rad/us
  double frequency = 0.0;  // rad/us
  double phase = 0.0;      // rad

  double at(double t) const;
};

enum class ScheduleKind { ideal_toggle, with_dd_train, sensing_df, sensing_pdd };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& name);

struct FloquetSchedule {
  ScheduleKind kind = ScheduleKind::ideal_toggle;
  std::vector<DriveSegment> segments;
  std::optional<AcDrive> ac;

  double period() const;
  /// Throws ConstructionError on a non-positive duration or a pulse whose
  /// rotation angle differs from pi by more than 1e-9.
  void validate() const;
  /// Reverses the segment order.
  FloquetSchedule reversed() const;
};

struct ScheduleParams {
  double period = 4.0;   // T, us
  double rabi = 0.0;     // Floquet Rabi frequency, rad/us
  double detuning = 0.0; // Floquet detuning h_z, rad/us
  double phase = 0.0;    // axis of the Floquet drive
  double tau = 0.05;     // half pulse spacing, us
  double t_pi = 0.032;   // pi pulse duration, us
  // sensing_pdd only: number of 4-pulse cycles in one schedule period.
  int pdd_cycles = 1;
};

FloquetSchedule build_schedule(ScheduleKind kind, const ScheduleParams& p);

/// Elementary evolution piece. Instantaneous pulses expand into
/// half-window, rotation, half-window; drive_on is false on the halves.
struct TimelinePiece {
  int segment = 0;
  double duration = 0.0;
  bool drive_on = true;
  bool instant_rotation = false;
};

std::vector<TimelinePiece> expand_period(const FloquetSchedule& schedule,
                                         bool instantaneous_pulses);

// ---- closed-form analytics ------------------------------------------------

/// h_z = 2 pi * 2k / T for k = 1..k_max.
std::vector<double> freezing_points(double period, int k_max);

/// True when h_z T / (4 pi) is a nonzero integer within `tol`.
bool at_freezing_point(double h_z, double period, double tol = 1e-9);

struct EffectiveHamiltonianCoeffs {
  double cx = 0.0;
  double cy = 0.0;
  bool includes_h0 = true;
};

/// Zeroth-order effective Hamiltonian. At h_z = 0 returns (omega, 0).
EffectiveHamiltonianCoeffs effective_hamiltonian(double omega, double h_z,
                                                 double period);

/// omega^3 / (4 h_z^2). Throws DomainError at h_z = 0.
double symmetry_breaking_scale(double omega, double h_z);

/// Kick operator coefficients (kx, ky) at time t in [0, T]. Requires the
/// freezing condition.
Eigen::Vector2d kick_operator(double t, double omega, double h_z,
                              double period);

/// Leading-order micromotion (mx, my, mz) at intra-period time t_star.
Eigen::Vector3d micromotion_prediction(double t_star, double omega, double h_z,
                                       double sz, double period);

}  // namespace dfreeze
