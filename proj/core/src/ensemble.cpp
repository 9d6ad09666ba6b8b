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

#include "dfreeze/ensemble.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "dfreeze/error.hpp"

namespace dfreeze {

double dipolar_coupling(const Eigen::Vector3d& ri, const Eigen::Vector3d& rj,
                        double j0) {
  const Eigen::Vector3d d = rj - ri;
  const double r2 = d.squaredNorm();
  if (!(r2 > 0.0)) {
    throw DomainError("dipolar_coupling: coincident spin positions");
  }
  const double r = std::sqrt(r2);
  const double cos2 = d.z() * d.z() / r2;
  return j0 * (3.0 * cos2 - 1.0) / (r2 * r);
}

namespace {

Eigen::MatrixXd coupling_matrix(const std::vector<Eigen::Vector3d>& pos,
                                double j0) {
  const int n = static_cast<int>(pos.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = dipolar_coupling(pos[i], pos[j], j0);
      J(i, j) = v;
      J(j, i) = v;
    }
  }
  return J;
}

}  // namespace

SpinEnsemble SpinEnsemble::from_positions(std::vector<Eigen::Vector3d> positions,
                                          double j0, Eigen::VectorXd disorder) {
  SpinEnsemble e;
  e.params.n = static_cast<int>(positions.size());
  e.params.j0 = j0;
  e.params.min_distance = 0.0;
  e.positions = std::move(positions);
  e.couplings = coupling_matrix(e.positions, j0);
  if (disorder.size() == 0) {
    e.disorder = Eigen::VectorXd::Zero(e.params.n);
  } else if (disorder.size() != e.params.n) {
    throw PreconditionError("from_positions: disorder length must equal n");
  } else {
    e.disorder = std::move(disorder);
  }
  return e;
}

SpinEnsemble sample_ensemble(const EnsembleParams& p) {
  if (p.n < 1) throw PreconditionError("sample_ensemble: n must be >= 1");
  if (!(p.density > 0.0)) throw PreconditionError("sample_ensemble: density must be > 0");
  if (p.min_distance < 0.0) throw PreconditionError("sample_ensemble: min_distance must be >= 0");
  if (p.disorder_width < 0.0) throw PreconditionError("sample_ensemble: disorder_width must be >= 0");

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double side = std::cbrt(static_cast<double>(p.n) / p.density);
  const double d2 = p.min_distance * p.min_distance;
  const long budget = static_cast<long>(p.max_attempts_per_spin) * p.n;

  std::vector<Eigen::Vector3d> pos;
  pos.reserve(p.n);
  long attempts = 0;
  while (static_cast<int>(pos.size()) < p.n) {
    if (++attempts > budget) {
      std::ostringstream msg;
      msg << "sample_ensemble: min_distance " << p.min_distance
          << " nm cannot be met at density " << p.density << " nm^-3 (placed "
          << pos.size() << " of " << p.n << " spins in " << budget
          << " attempts)";
      throw ConstructionError(msg.str());
    }
    Eigen::Vector3d r(side * unit(rng), side * unit(rng), side * unit(rng));
    bool ok = true;
    for (const auto& q : pos) {
      const double s = (r - q).squaredNorm();
      if (s < d2 || s == 0.0) {
        ok = false;
        break;
      }
    }
    if (ok) pos.push_back(r);
  }

  Eigen::VectorXd h = Eigen::VectorXd::Zero(p.n);
  if (p.disorder_width > 0.0) {
    std::normal_distribution<double> gauss(0.0, p.disorder_width);
    for (int i = 0; i < p.n; ++i) h[i] = gauss(rng);
  }

  SpinEnsemble e;
  e.params = p;
  e.positions = std::move(pos);
  e.couplings = coupling_matrix(e.positions, p.j0);
  e.disorder = std::move(h);
  return e;
}

Eigen::Vector3d ProductState::bloch() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
          std::cos(theta)};
}

ProductState initial_state(double theta, double phi) {
  if (!(theta >= 0.0 && theta <= units::kPi)) {
    throw DomainError("initial_state: theta must lie in [0, pi]");
  }
  if (!std::isfinite(phi)) throw DomainError("initial_state: phi must be finite");
  double w = std::fmod(phi, units::kTwoPi);
  if (w < 0.0) w += units::kTwoPi;
  if (w >= units::kTwoPi) w = 0.0;
  return {theta, w};
}

StaticHamiltonianTerms static_terms(const SpinEnsemble& e) {
  StaticHamiltonianTerms t;
  const int n = e.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (e.couplings(i, j) != 0.0) t.couplings.push_back({i, j, e.couplings(i, j)});
    }
    if (e.disorder[i] != 0.0) t.onsite.push_back({i, e.disorder[i]});
  }
  return t;
}

double coupling_consistency_error(const SpinEnsemble& e) {
  double worst = 0.0;
  const int n = e.size();
  for (int i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(e.couplings(i, i)));
    for (int j = i + 1; j < n; ++j) {
      const double ref = dipolar_coupling(e.positions[i], e.positions[j], e.params.j0);
      worst = std::max(worst, std::abs(e.couplings(i, j) - ref));
      worst = std::max(worst, std::abs(e.couplings(j, i) - ref));
    }
  }
  return worst;
}

}  // namespace dfreeze
