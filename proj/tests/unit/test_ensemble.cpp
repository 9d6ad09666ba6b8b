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

#include <doctest.h>

#include <cmath>

#include <Eigen/Geometry>

#include "dfreeze/ensemble.hpp"
#include "dfreeze/error.hpp"
#include "dfreeze/units.hpp"

using namespace dfreeze;
using units::kTwoPi;

TEST_SUITE("ensemble") {

TEST_CASE("dipolar coupling hand values") {
  const Eigen::Vector3d o = Eigen::Vector3d::Zero();
  // 52 * 2 / 1000 MHz along z, 52 * (-1) / 1000 MHz in plane.
  CHECK(dipolar_coupling(o, {0, 0, 10}) / kTwoPi == doctest::Approx(0.104).epsilon(1e-12));
  CHECK(dipolar_coupling(o, {10, 0, 0}) / kTwoPi == doctest::Approx(-0.052).epsilon(1e-12));
  CHECK(dipolar_coupling(o, {0, 10, 0}) / kTwoPi == doctest::Approx(-0.052).epsilon(1e-12));

  const double th = std::acos(1.0 / std::sqrt(3.0));
  const Eigen::Vector3d magic(7 * std::sin(th), 0, 7 * std::cos(th));
  CHECK(std::abs(dipolar_coupling(o, magic)) < 1e-12);

  CHECK_THROWS_AS(dipolar_coupling(o, o), DomainError);
}

TEST_CASE("coupling is symmetric in its arguments and scales as r^-3") {
  const Eigen::Vector3d a(1, 2, 3), b(4, -2, 9);
  CHECK(dipolar_coupling(a, b) == doctest::Approx(dipolar_coupling(b, a)));
  const double j1 = dipolar_coupling(a, b);
  const double j2 = dipolar_coupling(2 * a, 2 * b);
  CHECK(j2 == doctest::Approx(j1 / 8));
}

TEST_CASE("single spin ensemble has no couplings") {
  EnsembleParams p;
  p.n = 1;
  p.seed = 0;
  p.disorder_width = 0.3;
  const auto e = sample_ensemble(p);
  CHECK(e.size() == 1);
  CHECK(static_terms(e).couplings.empty());
  CHECK(e.disorder.size() == 1);
}

TEST_CASE("pair placed 10 nm apart along z") {
  const auto e = SpinEnsemble::from_positions({{0, 0, 0}, {0, 0, 10}});
  CHECK(e.couplings(0, 1) == doctest::Approx(2 * units::kDipolarJ0 / 1000));
  CHECK(e.couplings(0, 1) / kTwoPi == doctest::Approx(0.104));
  CHECK(e.couplings(0, 0) == 0.0);
}

TEST_CASE("sampling is deterministic in the seed") {
  EnsembleParams p;
  p.n = 20;
  p.density = 1e-3;
  p.seed = 42;
  p.disorder_width = 0.1;
  const auto a = sample_ensemble(p);
  const auto b = sample_ensemble(p);
  for (int i = 0; i < p.n; ++i) CHECK(a.positions[i] == b.positions[i]);
  CHECK(a.couplings == b.couplings);
  CHECK(a.disorder == b.disorder);
  p.seed = 43;
  CHECK(sample_ensemble(p).positions[0] != a.positions[0]);
}

TEST_CASE("sampled ensembles satisfy their invariants across seeds") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    EnsembleParams p;
    p.n = 12;
    p.density = 5e-4;
    p.min_distance = 6.0;
    p.seed = seed;
    const auto e = sample_ensemble(p);
    CHECK(e.couplings.isApprox(e.couplings.transpose(), 0.0));
    CHECK(e.couplings.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK(coupling_consistency_error(e) == 0.0);
    const double side = std::cbrt(p.n / p.density);
    for (int i = 0; i < p.n; ++i) {
      CHECK(e.positions[i].minCoeff() >= 0.0);
      CHECK(e.positions[i].maxCoeff() <= side);
      for (int j = i + 1; j < p.n; ++j) {
        CHECK((e.positions[i] - e.positions[j]).norm() >= p.min_distance);
      }
    }
  }
}

TEST_CASE("disorder is Gaussian with the requested width") {
  EnsembleParams p;
  p.n = 4000;
  p.density = 1e-4;
  p.min_distance = 0.0;
  p.disorder_width = 0.5;
  p.seed = 3;
  const auto e = sample_ensemble(p);
  const double mean = e.disorder.mean();
  const double sd = std::sqrt((e.disorder.array() - mean).square().sum() / (p.n - 1));
  CHECK(std::abs(mean) < 4 * 0.5 / std::sqrt(p.n));
  CHECK(sd == doctest::Approx(0.5).epsilon(0.05));
  p.disorder_width = 0.0;
  CHECK(sample_ensemble(p).disorder.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("impossible packing reports the violated constraint") {
  EnsembleParams p;
  p.n = 50;
  p.density = 1e-2;
  p.min_distance = 10.0;
  p.max_attempts_per_spin = 200;
  try {
    sample_ensemble(p);
    FAIL("expected ConstructionError");
  } catch (const ConstructionError& err) {
    CHECK(std::string(err.what()).find("min_distance") != std::string::npos);
  }
}

TEST_CASE("invalid parameters are rejected") {
  EnsembleParams p;
  p.n = 0;
  CHECK_THROWS_AS(sample_ensemble(p), PreconditionError);
  p.n = 3;
  p.density = 0;
  CHECK_THROWS_AS(sample_ensemble(p), PreconditionError);
  p.density = 1e-3;
  p.disorder_width = -1;
  CHECK_THROWS_AS(sample_ensemble(p), PreconditionError);
}

TEST_CASE("couplings are invariant under rotation about z") {
  EnsembleParams p;
  p.n = 30;
  p.density = 1e-3;
  p.seed = 9;
  const auto e = sample_ensemble(p);
  const Eigen::Matrix3d R = Eigen::AngleAxisd(0.731, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  std::vector<Eigen::Vector3d> rotated;
  for (const auto& r : e.positions) rotated.push_back(R * r);
  const auto f = SpinEnsemble::from_positions(rotated);
  CHECK((f.couplings - e.couplings).cwiseAbs().maxCoeff() < 1e-12 * e.couplings.cwiseAbs().maxCoeff());
}

TEST_CASE("initial product states") {
  CHECK(initial_state(0, 0).bloch().isApprox(Eigen::Vector3d(0, 0, 1)));
  CHECK(initial_state(units::kPi / 2, 0).bloch().isApprox(Eigen::Vector3d(1, 0, 0)));
  const auto s = initial_state(std::acos(1 / std::sqrt(3.0)), units::kPi / 4);
  CHECK(s.bloch().isApprox(Eigen::Vector3d::Constant(1 / std::sqrt(3.0)), 1e-14));
  CHECK(initial_state(1.0, -units::kPi / 2).phi == doctest::Approx(1.5 * units::kPi));
  CHECK_THROWS_AS(initial_state(-0.1, 0), DomainError);
  CHECK_THROWS_AS(initial_state(4.0, 0), DomainError);
}

}
