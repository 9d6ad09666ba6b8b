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

// Dense exact evolution in the 2^n z-product basis. Bit i of a basis index
// is spin i, with 0 meaning |up> (sz = +1/2); the all-up state is index 0.

#pragma once

#include <vector>

#include <Eigen/Core>

#include "dfreeze/ensemble.hpp"
#include "dfreeze/protocol.hpp"
#include "dfreeze/series.hpp"

namespace dfreeze::ed {

using StateVector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr int kDefaultCapacity = 12;

struct Options {
  int capacity = kDefaultCapacity;
  double norm_tolerance = 1e-6;
  bool instantaneous_pulses = false;
  // Midpoint substeps per ac oscillation period for segments with ac_sign != 0.
  int ac_substeps_per_cycle = 64;
};

enum class Observable { Sx, Sy, Sz };

/// H0 + rabi (cos(phase) Sx + sin(phase) Sy) + detuning Sz. Throws
/// CapacityError above `capacity` spins.
Matrix hamiltonian_matrix(const SpinEnsemble& ensemble, double rabi,
                          double detuning, double phase,
                          int capacity = kDefaultCapacity);

/// Total spin operator (Sx, Sy or Sz) on n spins.
Matrix total_spin(int n, Observable o);

StateVector product_state(int n, const ProductState& s);

/// Per-spin magnetization (2/n) <S>.
Eigen::Vector3d magnetization(const StateVector& psi, int n);

/// exp(-i H t) for Hermitian H, via eigendecomposition.
Matrix expm_hermitian(const Matrix& h, double t);

/// Evolves `state` through whole periods of `schedule`, recording the
/// magnetization at every sample time (sorted, starting at or after 0).
/// Final state is written back into `state` when non-null.
MagnetizationSeries evolve(StateVector psi, const SpinEnsemble& ensemble,
                           const FloquetSchedule& schedule,
                           const std::vector<double>& sample_times,
                           const Options& opt = {},
                           StateVector* final_state = nullptr);

/// Samples at k T / samples_per_period for k = 0..n_periods*samples_per_period.
MagnetizationSeries propagate(const StateVector& psi,
                              const SpinEnsemble& ensemble,
                              const FloquetSchedule& schedule, int n_periods,
                              int samples_per_period, const Options& opt = {});

/// Ordered product of the segment propagators over one period.
Matrix floquet_unitary(const FloquetSchedule& schedule,
                       const SpinEnsemble& ensemble, const Options& opt = {});

struct FloquetEigensystem {
  Eigen::VectorXd quasi_phases;  // mu_n in (-pi, pi]
  Matrix vectors;                // columns |mu_n>
};

/// U |mu> = e^{-i mu} |mu>. Uses a complex Schur decomposition so the
/// eigenvector matrix is unitary even for near-degenerate spectra.
FloquetEigensystem floquet_eigensystem(const Matrix& u);

struct DiagonalEnsembleResult {
  double value = 0.0;
  bool degenerate = false;  // quasi-phase spacing below 1e-10
  double min_gap = 0.0;
};

/// sum_n |<mu_n|psi>|^2 <mu_n|O|mu_n> for a total spin observable.
DiagonalEnsembleResult diagonal_ensemble_average(const StateVector& initial,
                                                 const FloquetEigensystem& eig,
                                                 Observable o);

}  // namespace dfreeze::ed
