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

// Discrete truncated Wigner sampling with mean-field trajectories.
//
// Each classical spin obeys d sigma_i / dt = B_i x sigma_i with
//   B_i = (rabi cos(phi) + sum_j J_ij sx_j / 2,
//          rabi sin(phi) + sum_j J_ij sy_j / 2,
//          detuning + h_i + delta_ac(t) - sum_j J_ij sz_j / 2),
// which reproduces the Heisenberg equations of H = B . s for a single spin.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dfreeze/ensemble.hpp"
#include "dfreeze/protocol.hpp"
#include "dfreeze/series.hpp"

namespace dfreeze::dtwa {

struct PhasePointTable {
  /// r_(0,0), r_(0,1), r_(1,0), r_(1,1).
  static const std::array<Eigen::Vector3d, 4>& vectors();
  /// A_alpha = (1 + r_alpha . sigma) / 2.
  static Eigen::Matrix2cd phase_point_operator(int alpha);
};

/// w_alpha = Tr(rho A_alpha) / 2 = (1 + r_alpha . b) / 4 for Bloch vector b.
std::array<double, 4> wigner_weights(const Eigen::Vector3d& bloch);

/// Per-trajectory stream seed derived from (seed, trajectory index).
std::uint64_t trajectory_seed(std::uint64_t seed, std::uint64_t index);

/// Initial classical spins, stored as three n x n_traj matrices.
struct TrajectoryBatch {
  int n = 0;
  int n_traj = 0;
  std::uint64_t seed = 0;
  ProductState state;
  Eigen::MatrixXd sx, sy, sz;
};

/// Phase-point frame used for sampling. `single` uses the fixed frame.
/// `mirrored_pairs` pairs trajectory 2m with its reflection y -> -y sampled in
/// the mirror frame, which restores the reflection symmetry the fixed frame
/// breaks (e.g. evenness of the rectified response in the field sign).
enum class FrameSampling { single, mirrored_pairs };

/// Samples every spin independently from the joint phase-point weights.
/// Bloch vectors with a negative weight are sampled as |up> and rotated.
TrajectoryBatch sample_initial(const ProductState& state, int n, int n_traj,
                               std::uint64_t seed,
                               FrameSampling frames = FrameSampling::single);

/// Derivative of a 3 x n configuration for one segment. `ac` is the
/// instantaneous ac detuning (already multiplied by the segment's sign).
Eigen::Matrix3Xd classical_eom(const Eigen::Matrix3Xd& config,
                               const SpinEnsemble& ensemble,
                               const DriveSegment& segment, double ac = 0.0);

struct Options {
  double dt = 0.0;         // RK4 step, us; 0 selects period / 400
  int threads = 0;         // 0 selects hardware concurrency
  int batch_size = 128;    // trajectories per GEMM block
  double norm_tolerance = 1e-3;
  bool instantaneous_pulses = true;
};

/// RK4 through whole periods of `schedule`. Returns batch means of the
/// per-spin magnetization and their standard errors at `sample_times`.
MagnetizationSeries evolve(const TrajectoryBatch& batch,
                           const SpinEnsemble& ensemble,
                           const FloquetSchedule& schedule,
                           const std::vector<double>& sample_times,
                           const Options& opt = {});

}  // namespace dfreeze::dtwa
