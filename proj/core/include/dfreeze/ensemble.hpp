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
#include <vector>

#include <Eigen/Core>

#include "dfreeze/units.hpp"

namespace dfreeze {

struct EnsembleParams {
  int n = 1;
  double density = 1e-3;       // spins per nm^3
  double min_distance = 2.0;   // nm
  double disorder_width = 0.0; // rad/us, Gaussian standard deviation
  std::uint64_t seed = 0;
  double j0 = units::kDipolarJ0;
  // Rejection budget, in attempts per spin.
  int max_attempts_per_spin = 20000;
};

/// Randomly placed dipolar spins. Immutable after construction.
struct SpinEnsemble {
  EnsembleParams params;
  std::vector<Eigen::Vector3d> positions;  // nm
  Eigen::MatrixXd couplings;               // J_ij, rad/us, zero diagonal
  Eigen::VectorXd disorder;                // h_i, rad/us

  int size() const { return static_cast<int>(positions.size()); }

  /// Builds couplings from explicit positions. Disorder defaults to zero.
  static SpinEnsemble from_positions(std::vector<Eigen::Vector3d> positions,
                                     double j0 = units::kDipolarJ0,
                                     Eigen::VectorXd disorder = {});
};

/// J0 (3 cos^2 theta - 1) / r^3, theta measured from the z axis.
/// Throws DomainError for coincident positions.
double dipolar_coupling(const Eigen::Vector3d& ri, const Eigen::Vector3d& rj,
                        double j0 = units::kDipolarJ0);

/// Uniform cube sampling with hard-core rejection. Deterministic in seed.
SpinEnsemble sample_ensemble(const EnsembleParams& params);

/// Uniform product state cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>.
struct ProductState {
  double theta = 0.0;
  double phi = 0.0;

  /// Per-spin Pauli expectations.
  Eigen::Vector3d bloch() const;
};

/// Validates theta in [0, pi] and wraps phi into [0, 2pi).
ProductState initial_state(double theta, double phi);

/// Sparse listing of H0 = sum_{i<j} J_ij (sx sx + sy sy - sz sz) + sum_i h_i sz.
struct StaticHamiltonianTerms {
  struct Coupling {
    int i;
    int j;
    double J;
  };
  struct Onsite {
    int i;
    double h;
  };
  std::vector<Coupling> couplings;
  std::vector<Onsite> onsite;
};

StaticHamiltonianTerms static_terms(const SpinEnsemble& ensemble);

/// Largest |J_ij - dipolar_coupling(r_i, r_j)| over all pairs.
double coupling_consistency_error(const SpinEnsemble& ensemble);

}  // namespace dfreeze
