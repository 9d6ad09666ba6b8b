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
#include <complex>

#include "dfreeze/dtwa.hpp"
#include "dfreeze/ed.hpp"
#include "dfreeze/error.hpp"
#include "dfreeze/units.hpp"

using namespace dfreeze;
using units::kPi;
using units::kTwoPi;

namespace {

SpinEnsemble dense(int n, std::uint64_t seed) {
  EnsembleParams p;
  p.n = n;
  p.density = 1e-3;
  p.min_distance = 5.0;
  p.seed = seed;
  return sample_ensemble(p);
}

FloquetSchedule toggle(double T, double omega, double h) {
  ScheduleParams p;
  p.period = T;
  p.rabi = omega;
  p.detuning = h;
  return build_schedule(ScheduleKind::ideal_toggle, p);
}

std::vector<double> grid(double t1, int n) {
  std::vector<double> t;
  for (int k = 0; k <= n; ++k) t.push_back(t1 * k / n);
  return t;
}

}  // namespace

TEST_SUITE("dtwa") {

TEST_CASE("phase point operators form a discrete Wigner frame") {
  using M = Eigen::Matrix2cd;
  M sum = M::Zero();
  for (int a = 0; a < 4; ++a) {
    const M A = dtwa::PhasePointTable::phase_point_operator(a);
    CHECK(std::abs(A.trace() - 1.0) < 1e-15);
    CHECK(A.isApprox(A.adjoint()));
    for (int b = 0; b < 4; ++b) {
      const double tr = (A * dtwa::PhasePointTable::phase_point_operator(b)).trace().real();
      CHECK(tr / 2 == doctest::Approx(a == b ? 1.0 : 0.0).scale(1.0));
    }
    sum += A;
  }
  CHECK(sum.isApprox(2.0 * M::Identity()));
}

TEST_CASE("Wigner weights reconstruct the density matrix") {
  for (double th : {0.0, 0.5, 1.2, kPi / 2, 2.5, kPi}) {
    for (double ph : {0.0, 0.7, 3.9}) {
      const auto b = initial_state(th, ph).bloch();
      const auto w = dtwa::wigner_weights(b);
      CHECK(w[0] + w[1] + w[2] + w[3] == doctest::Approx(1.0));
      Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
      for (int a = 0; a < 4; ++a) rho += w[a] * dtwa::PhasePointTable::phase_point_operator(a);
      Eigen::Matrix2cd ref;
      using c = std::complex<double>;
      ref << c(1 + b.z(), 0), c(b.x(), -b.y()), c(b.x(), b.y()), c(1 - b.z(), 0);
      CHECK((rho - ref / 2.0).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
  const auto up = dtwa::wigner_weights({0, 0, 1});
  CHECK(up[0] == 0.5);
  CHECK(up[1] == 0.5);
  CHECK(up[2] == 0.0);
}

TEST_CASE("sampling reproduces the mean and pins sigma_z for the up state") {
  const auto up = dtwa::sample_initial(initial_state(0, 0), 5, 200, 1);
  CHECK(up.sz.minCoeff() == 1.0);
  CHECK(up.sz.maxCoeff() == 1.0);
  CHECK(up.sx.cwiseAbs().minCoeff() == 1.0);

  for (double th : {0.6, kPi / 2, 2.2}) {
    const auto s = initial_state(th, 1.0);
    const auto b = dtwa::sample_initial(s, 10, 4000, 3);
    const Eigen::Vector3d m(b.sx.mean(), b.sy.mean(), b.sz.mean());
    // Per-component variance is at most 1 for every phase-point vector in the rotated frame.
    const double tol = 5.0 * std::sqrt(3.0 / (10 * 4000));
    CHECK((m - s.bloch()).cwiseAbs().maxCoeff() < tol);
    const Eigen::ArrayXXd len = (b.sx.array().square() + b.sy.array().square() + b.sz.array().square());
    CHECK((len - 3.0).abs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(dtwa::sample_initial(initial_state(0, 0), 0, 4, 1), PreconditionError);
}

TEST_CASE("mirrored frame pairs are reflections and stay unbiased") {
  const auto m = dtwa::FrameSampling::mirrored_pairs;
  const auto up = dtwa::sample_initial(initial_state(0, 0), 6, 9, 4, m);
  for (int k = 0; k + 1 < up.n_traj; k += 2) {
    CHECK(up.sx.col(k + 1) == up.sx.col(k));
    CHECK(up.sy.col(k + 1) == -up.sy.col(k));
    CHECK(up.sz.col(k + 1) == up.sz.col(k));
  }
  // The fixed frame only has sx = sy for |up>; the mirror frame has sx = -sy.
  CHECK((up.sx.col(0) - up.sy.col(0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((up.sx.col(1) + up.sy.col(1)).cwiseAbs().maxCoeff() == 0.0);

  for (double th : {0.6, kPi / 4, 2.2}) {
    const auto s = initial_state(th, 1.0);
    const auto b = dtwa::sample_initial(s, 10, 4001, 3, m);
    const Eigen::Vector3d mean(b.sx.mean(), b.sy.mean(), b.sz.mean());
    const double tol = 5.0 * std::sqrt(3.0 / (10 * 2000));
    CHECK((mean - s.bloch()).cwiseAbs().maxCoeff() < tol);
  }
}

TEST_CASE("trajectory seeds are decorrelated") {
  CHECK(dtwa::trajectory_seed(1, 0) != dtwa::trajectory_seed(1, 1));
  CHECK(dtwa::trajectory_seed(1, 0) != dtwa::trajectory_seed(2, 0));
  CHECK(dtwa::trajectory_seed(7, 9) == dtwa::trajectory_seed(7, 9));
}

TEST_CASE("classical equation of motion for a single spin") {
  const auto e = SpinEnsemble::from_positions({{0, 0, 0}});
  DriveSegment seg{1.0, 0.8, 0.3, kPi / 2, SegmentKind::continuous, 0.0};
  Eigen::Matrix3Xd s(3, 1);
  s << 1, 0, 0;
  const auto d = dtwa::classical_eom(s, e, seg, 0.1);
  // B = (0, 0.8, 0.4); B x (1, 0, 0) = (0, 0.4, -0.8).
  CHECK(d(0, 0) == doctest::Approx(0.0).scale(1.0));
  CHECK(d(1, 0) == doctest::Approx(0.4));
  CHECK(d(2, 0) == doctest::Approx(-0.8));
}

TEST_CASE("noninteracting dynamics are reproduced trajectory by trajectory") {
  const auto e = SpinEnsemble::from_positions({{0, 0, 0}});
  const double w = kTwoPi * 0.1;
  const auto b = dtwa::sample_initial(initial_state(0, 0), 1, 2000, 5);
  const auto t = grid(8.0, 16);
  const auto s = dtwa::evolve(b, e, toggle(4.0, w, 0.0), t);
  const double my0 = b.sy.mean();
  for (std::size_t i = 0; i < t.size(); ++i) {
    // Rotation about x applied to the sampled mean (0, <sy>, 1).
    const double c = std::cos(w * t[i]), sn = std::sin(w * t[i]);
    CHECK(s.m[i].z() == doctest::Approx(c + my0 * sn).epsilon(1e-8).scale(1.0));
    CHECK(s.m[i].y() == doctest::Approx(my0 * c - sn).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("total sigma_z is conserved without drive") {
  const auto e = dense(12, 4);
  const auto b = dtwa::sample_initial(initial_state(0.8, 0.3), 12, 300, 6);
  const auto s = dtwa::evolve(b, e, toggle(2.0, 0.0, 1.7), grid(20.0, 20));
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.m[i].z() == doctest::Approx(s.m[0].z()).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("agrees with exact dynamics while J t is small") {
  const int n = 8;
  EnsembleParams p;
  p.n = n;
  p.density = 1e-4;
  p.min_distance = 5.0;
  p.seed = 12;
  const auto e = sample_ensemble(p);
  const double w = kTwoPi * 0.25, h = kTwoPi * 0.3;
  const auto sched = toggle(2.0, w, h);
  const auto t = grid(2.0, 10);
  const auto exact = ed::evolve(ed::product_state(n, initial_state(0, 0)), e, sched, t);
  const auto b = dtwa::sample_initial(initial_state(0, 0), n, 8000, 9);
  const auto approx = dtwa::evolve(b, e, sched, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs(approx.m[i][c] - exact.m[i][c]) < 0.02 + 4 * approx.stderr_m[i][c]);
    }
  }
}

TEST_CASE("step refinement and thread count do not change the result") {
  const auto e = dense(10, 2);
  const auto sched = toggle(4.0, kTwoPi * 0.1, kTwoPi * 0.5);
  const auto b = dtwa::sample_initial(initial_state(0, 0), 10, 256, 7);
  const auto t = grid(8.0, 8);
  dtwa::Options o1;
  o1.threads = 1;
  o1.batch_size = 32;
  dtwa::Options o2 = o1;
  o2.dt = 4.0 / 800;
  dtwa::Options o3 = o1;
  o3.threads = 3;
  const auto a = dtwa::evolve(b, e, sched, t, o1);
  const auto c = dtwa::evolve(b, e, sched, t, o2);
  const auto d = dtwa::evolve(b, e, sched, t, o3);
  CHECK(a.metadata.at("dt_us") == "0.01");
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK((a.m[i] - c.m[i]).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(a.m[i] == d.m[i]);
    CHECK(a.stderr_m[i] == d.stderr_m[i]);
  }
  const auto again = dtwa::evolve(dtwa::sample_initial(initial_state(0, 0), 10, 256, 7), e, sched, t, o1);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(again.m[i] == a.m[i]);
}

TEST_CASE("standard error scales as the inverse square root of the trajectory count") {
  const auto e = dense(10, 3);
  const auto sched = toggle(2.0, kTwoPi * 0.2, kTwoPi * 0.3);
  const std::vector<double> t = {3.0};
  const auto s1 = dtwa::evolve(dtwa::sample_initial(initial_state(0, 0), 10, 400, 1), e, sched, t);
  const auto s4 = dtwa::evolve(dtwa::sample_initial(initial_state(0, 0), 10, 1600, 2), e, sched, t);
  const double ratio = s1.stderr_m[0].z() / s4.stderr_m[0].z();
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("numerical failures and bad inputs") {
  const auto e = dense(4, 1);
  const auto b = dtwa::sample_initial(initial_state(0.5, 0), 4, 8, 1);
  dtwa::Options coarse;
  coarse.dt = 2.0;
  try {
    dtwa::evolve(b, e, toggle(2.0, 0.0, 40.0), {20.0}, coarse);
    FAIL("expected NumericalError");
  } catch (const NumericalError& err) {
    CHECK(std::string(err.what()).find("segment") != std::string::npos);
  }
  CHECK_THROWS_AS(dtwa::evolve(b, e, toggle(2, 1, 1), {1.0, 0.5}), PreconditionError);
  CHECK_THROWS_AS(dtwa::evolve(b, e, toggle(2, 1, 1), {-1.0}), PreconditionError);
  CHECK_THROWS_AS(dtwa::evolve(b, dense(5, 1), toggle(2, 1, 1), {1.0}), PreconditionError);
}

}
