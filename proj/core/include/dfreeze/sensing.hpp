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
#include <string>
#include <vector>

#include "dfreeze/dtwa.hpp"
#include "dfreeze/ed.hpp"
#include "dfreeze/ensemble.hpp"
#include "dfreeze/protocol.hpp"
#include "dfreeze/units.hpp"

namespace dfreeze::sensing {

/// B(t) = amplitude cos(2 pi f t + phase).
struct AcField {
  double amplitude_ut = 0.0;
  double frequency_mhz = 0.0;
  double phase = 0.0;
  double gamma = units::kGammaNV;  // rad/us per uT

  AcDrive as_drive() const;
};

enum class Protocol { df, pdd };
enum class Backend { ed, dtwa };
enum class Mode { ideal_rectification, explicit_pulses };

std::string to_string(Protocol p);
std::string to_string(Backend b);
std::string to_string(Mode m);

struct SensingSequence {
  Protocol protocol = Protocol::df;
  double tau = 0.05;          // us
  double t_pi = 0.032;        // us
  double period = 4.0;        // Floquet T, us (DF only)
  double rabi = 0.0;          // Floquet Omega, rad/us (DF only)
  double detuning = 0.0;      // Floquet h_z, rad/us (DF only)
  double sensing_time = 4.0;  // T_s, us
  double t_prime = 0.0;       // modified-condition period; 0 means T

  double filter_frequency_mhz() const;
  double effective_t_prime() const;
  /// The schedule simulated in explicit_pulses mode, with the field attached.
  FloquetSchedule explicit_schedule(const AcField& field) const;
};

/// 1 / (4 tau + 2 t_pi), MHz.
double filter_center_frequency(double tau, double t_pi);

/// (2/pi) gamma B_ac, rad/us.
double rectified_detuning(const AcField& field);

/// B_ac with h_ac T' = 4 pi k, k = 1..k_max, in uT.
std::vector<double> ac_freezing_amplitudes(double t_prime, int k_max,
                                           double gamma = units::kGammaNV);

/// (Omega / h_z)(2 gamma B_ac / pi). Throws DomainError at h_z = 0.
double sensing_response_coefficient(double omega, double h_z, double b_ac,
                                    double gamma = units::kGammaNV);

struct Options {
  Backend backend = Backend::ed;
  Mode mode = Mode::ideal_rectification;
  int n_traj = 1000;
  std::uint64_t seed = 0;
  // Mirrored phase-point pairs keep the DTWA response even in B_ac.
  dtwa::FrameSampling frames = dtwa::FrameSampling::mirrored_pairs;
  ed::Options ed;
  dtwa::Options dtwa;
};

struct Response {
  double sensing_time = 0.0;
  double value = 0.0;
  double stderr_value = 0.0;
  /// In-plane phase atan2(my, mx) after T_s (PDD only).
  double phase = 0.0;
};

/// Response <S_z> after T_s, normalized per spin. DF starts in |up> and reads
/// m_z. PDD starts along +x and reads m_x, which a final pi/2 readout pulse
/// maps onto S_z. One evolution serves every requested T_s.
std::vector<Response> simulate_sensing(const SensingSequence& seq,
                                       const AcField& field,
                                       const SpinEnsemble& ensemble,
                                       const Options& opt,
                                       const std::vector<double>& sensing_times);

Response simulate_sensing(const SensingSequence& seq, const AcField& field,
                          const SpinEnsemble& ensemble, const Options& opt);

/// Rectification efficiency of the implemented pulse timing: the mean of
/// s(t) cos(2 pi f t + alpha) over the first rectification window, divided
/// by 2/pi, where s(t) is the toggling-frame sign of S_z (cos of the pulse
/// rotation angle during finite pulses). Equals 1 for ideal pulses at the
/// optimal phase.
double rectification_efficiency(const SensingSequence& seq, double frequency_mhz,
                                double alpha);

/// Phase maximizing rectification_efficiency, by grid scan and golden-section
/// refinement. Returned in (-pi, pi].
double optimal_ac_phase(const SensingSequence& seq, double frequency_mhz,
                        int n_scan = 360);

struct PddBudget {
  double t2 = 10.2;                   // us
  double alpha = 0.81;
  double readout_efficiency = 0.0139; // C
  double t_init = 40.0;               // us
  double t_readout = 2.0;             // us
  double t_delay = 5.133;             // us

  double overhead() const { return t_init + t_readout + t_delay; }
  void validate() const;
};

/// (pi/(2 gamma)) e^{(T_s/T2)^alpha} / C * sqrt(T_s + T_o) / T_s, nT/sqrt(Hz).
double pdd_theoretical_sensitivity(double ts, const PddBudget& budget,
                                   double gamma = units::kGammaNV);

struct CurvePoint {
  double b_ac = 0.0;  // uT
  double mean = 0.0;
  double sigma = 0.0;  // standard deviation of the trial mean
};

enum class Region { all, near_freezing, away };
std::string to_string(Region r);

struct SensitivityOptions {
  Region region = Region::all;
  std::vector<double> freezing_amplitudes;  // uT, mirrored to negative B
  double near_halfwidth = 0.0;              // uT
  double n_trials = 1.0;
};

struct SensitivityEstimate {
  double ts = 0.0;            // us
  double slope = 0.0;         // per uT
  double sigma_s = 0.0;
  double total_time_s = 0.0;  // T_t, seconds
  double eta = 0.0;           // nT/sqrt(Hz)
  double b_at_optimum = 0.0;  // uT
  bool infinite = false;
};

/// 3-point moving average, centered difference, maximal |slope| inside the
/// region, eta = sigma_s sqrt(T_t) / |slope| with T_t = (T_s + T_o) N_trials.
SensitivityEstimate sensitivity_from_curve(const std::vector<CurvePoint>& curve,
                                           double ts, const PddBudget& overheads,
                                           const SensitivityOptions& opt = {});

}  // namespace dfreeze::sensing
