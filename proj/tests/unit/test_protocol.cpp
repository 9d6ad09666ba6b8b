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
#include <limits>

#include "dfreeze/error.hpp"
#include "dfreeze/protocol.hpp"
#include "dfreeze/units.hpp"

using namespace dfreeze;
using units::kPi;
using units::kTwoPi;

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

TEST_SUITE("protocol") {

TEST_CASE("freezing points") {
  const auto h = freezing_points(4.0, 3);
  REQUIRE(h.size() == 3);
  CHECK(h[0] / kTwoPi == doctest::Approx(0.5));
  CHECK(h[1] / kTwoPi == doctest::Approx(1.0));
  CHECK(h[2] / kTwoPi == doctest::Approx(1.5));
  for (int k = 0; k < 3; ++k) CHECK(h[k] * 4.0 / kTwoPi == doctest::Approx(2.0 * (k + 1)));
  CHECK(freezing_points(2.0, 1)[0] / kTwoPi == doctest::Approx(1.0));
  CHECK_THROWS_AS(freezing_points(0.0, 1), PreconditionError);
  CHECK_THROWS_AS(freezing_points(1.0, 0), PreconditionError);
}

TEST_CASE("effective Hamiltonian vanishes at every freezing point") {
  const double omega = kTwoPi * 0.1;
  for (double T : {0.5, 1.0, 2.0, 4.0, 7.3}) {
    for (double h : freezing_points(T, 40)) {
      const auto c = effective_hamiltonian(omega, h, T);
      CHECK(std::abs(c.cx) <= 8 * kEps * omega);
      CHECK(std::abs(c.cy) <= 8 * kEps * omega);
      const auto m = effective_hamiltonian(omega, -h, T);
      CHECK(std::abs(m.cx) <= 8 * kEps * omega);
      CHECK(std::abs(m.cy) <= 8 * kEps * omega);
    }
  }
}

TEST_CASE("effective Hamiltonian hand values") {
  const double omega = 0.7, T = 4.0;
  auto c = effective_hamiltonian(omega, kTwoPi / T, T);  // h T = 2 pi
  CHECK(std::abs(c.cx) < 1e-15);
  CHECK(c.cy == doctest::Approx(-2 * omega / kPi).epsilon(1e-14));
  c = effective_hamiltonian(omega, kPi / T, T);  // h T = pi
  CHECK(c.cx == doctest::Approx(2 * omega / kPi).epsilon(1e-14));
  CHECK(c.cy == doctest::Approx(-2 * omega / kPi).epsilon(1e-14));
  c = effective_hamiltonian(omega, 0.0, T);
  CHECK(c.cx == omega);
  CHECK(c.cy == 0.0);
  CHECK(c.includes_h0);
  // Continuity into the h = 0 limit.
  c = effective_hamiltonian(omega, 1e-6, T);
  CHECK(c.cx == doctest::Approx(omega).epsilon(1e-9));
}

TEST_CASE("symmetry-breaking scale") {
  const double w = kTwoPi * 0.1, h = kTwoPi * 0.5;
  CHECK(symmetry_breaking_scale(w, h) / kTwoPi == doctest::Approx(0.001));
  CHECK(symmetry_breaking_scale(0.0, h) == 0.0);
  const double c = std::cbrt(4.0);
  CHECK(symmetry_breaking_scale(w * c, 2 * h) == doctest::Approx(symmetry_breaking_scale(w, h)));
  CHECK_THROWS_AS(symmetry_breaking_scale(w, 0.0), DomainError);
}

TEST_CASE("kick operator") {
  const double T = 4.0, w = kTwoPi * 0.1;
  const double h = freezing_points(T, 1)[0];
  for (double t : {0.0, T / 2, T}) {
    const auto k = kick_operator(t, w, h, T);
    CHECK(std::abs(k[0]) < 1e-15);
    CHECK(std::abs(k[1]) < 1e-15);
  }
  const auto k8 = kick_operator(T / 8, w, h, T);
  CHECK(k8[0] == doctest::Approx(w / h));
  CHECK(k8[1] == doctest::Approx(-w / h));
  for (double t = 0.0; t <= T / 2; t += 0.0731) {
    const auto a = kick_operator(t, w, h, T);
    const auto b = kick_operator(T - t, w, h, T);
    CHECK(b[0] == doctest::Approx(-a[0]).epsilon(1e-9).scale(1e-12));
    CHECK(b[1] == doctest::Approx(-a[1]).epsilon(1e-9).scale(1e-12));
  }
  // Continuity across the half period.
  const auto lo = kick_operator(T / 2 - 1e-9, w, h, T);
  const auto hi = kick_operator(T / 2 + 1e-9, w, h, T);
  CHECK((lo - hi).norm() < 1e-8);
  CHECK_THROWS_AS(kick_operator(1.0, w, 0.9 * h, T), PreconditionError);
  CHECK_THROWS_AS(kick_operator(T * 1.1, w, h, T), PreconditionError);
}

TEST_CASE("micromotion prediction") {
  const double T = 4.0, h = freezing_points(T, 1)[0], w = 0.2 * h, sz = 0.57;
  const auto m0 = micromotion_prediction(0.0, w, h, sz, T);
  CHECK(m0.isApprox(Eigen::Vector3d(0, 0, sz)));
  const auto mT = micromotion_prediction(T, w, h, sz, T);
  CHECK((mT - m0).norm() < 1e-14);

  // Extremes over one period.
  double mx_lo = 1, mx_hi = -1, my_lo = 1, my_hi = -1, mz_lo = 1, mz_hi = -1;
  for (int k = 0; k <= 4000; ++k) {
    const auto m = micromotion_prediction(T * k / 4000, w, h, sz, T);
    mx_lo = std::min(mx_lo, m.x());
    mx_hi = std::max(mx_hi, m.x());
    my_lo = std::min(my_lo, m.y());
    my_hi = std::max(my_hi, m.y());
    mz_lo = std::min(mz_lo, m.z());
    mz_hi = std::max(mz_hi, m.z());
  }
  CHECK(mx_hi == doctest::Approx(2 * 0.2 * sz).epsilon(1e-6));
  CHECK(mx_lo == doctest::Approx(-2 * 0.2 * sz).epsilon(1e-6));
  CHECK(my_hi - my_lo == doctest::Approx(2 * 0.2 * sz).epsilon(1e-6));
  CHECK(mz_hi - mz_lo == doctest::Approx(2 * 0.04 * sz).epsilon(1e-6));
  CHECK(mx_hi - mx_lo > my_hi - my_lo);
  CHECK(my_hi - my_lo > mz_hi - mz_lo);

  CHECK_THROWS_AS(micromotion_prediction(0.0, w, h, 1.5, T), PreconditionError);
  CHECK_THROWS_AS(micromotion_prediction(0.0, w, 1.1 * h, sz, T), PreconditionError);
}

TEST_CASE("ideal toggle schedule") {
  ScheduleParams p;
  p.period = 4.0;
  p.rabi = 0.3;
  p.detuning = 1.2;
  const auto s = build_schedule(ScheduleKind::ideal_toggle, p);
  REQUIRE(s.segments.size() == 2);
  CHECK(s.segments[0].duration == 2.0);
  CHECK(s.segments[1].duration == 2.0);
  CHECK(s.segments[0].detuning == 1.2);
  CHECK(s.segments[1].detuning == -1.2);
  CHECK(s.segments[0].rabi == s.segments[1].rabi);
  CHECK(s.period() == 4.0);
}

TEST_CASE("dd train tiling, spacing and toggling frame") {
  ScheduleParams p;
  p.period = 4.0;
  p.rabi = 0.6;
  p.detuning = kPi;
  p.tau = 0.05;
  p.t_pi = 0.032;
  const auto s = build_schedule(ScheduleKind::with_dd_train, p);
  CHECK(s.period() == doctest::Approx(4.0).epsilon(1e-14));

  int pulses = 0, parity = 1;
  double t = 0.0;
  std::vector<double> centers;
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const auto& g = s.segments[i];
    if (g.kind == SegmentKind::pi_pulse) {
      CHECK(g.duration == doctest::Approx(0.032));
      CHECK(g.rabi * g.duration == doctest::Approx(kPi).epsilon(1e-12));
      CHECK(g.phase == doctest::Approx((pulses % 4) < 2 ? 0.0 : kPi));
      centers.push_back(t + g.duration / 2);
      ++pulses;
      parity = -parity;
    } else {
      const double sign_f = t < 2.0 - 1e-12 ? 1.0 : -1.0;
      CHECK(parity * g.detuning == doctest::Approx(sign_f * p.detuning));
    }
    t += g.duration;
  }
  CHECK(pulses % 4 == 0);
  // Within a half period consecutive pulse centers are 2 tau + t_pi apart.
  for (std::size_t k = 1; k < centers.size(); ++k) {
    if ((centers[k] < 2.0) == (centers[k - 1] < 2.0)) {
      CHECK(centers[k] - centers[k - 1] == doctest::Approx(0.132));
    }
  }
  p.period = 0.4;
  CHECK_THROWS_AS(build_schedule(ScheduleKind::with_dd_train, p), ConstructionError);
}

TEST_CASE("sensing schedules") {
  ScheduleParams p;
  p.period = 4.0;
  p.rabi = 0.6;
  p.detuning = 0.0;
  const auto df = build_schedule(ScheduleKind::sensing_df, p);
  const double slot = 2 * p.tau + p.t_pi;
  const double m = std::round(2.0 / slot);
  CHECK(df.period() == doctest::Approx(2 * m * slot).epsilon(1e-12));
  int pulses = 0;
  for (const auto& g : df.segments) {
    pulses += g.kind == SegmentKind::pi_pulse;
    CHECK(g.ac_sign == 1.0);
  }
  CHECK(pulses == 2 * m + 2);

  const auto pdd = build_schedule(ScheduleKind::sensing_pdd, p);
  CHECK(pdd.period() == doctest::Approx(8 * p.tau + 4 * p.t_pi));
  p.pdd_cycles = 3;
  CHECK(build_schedule(ScheduleKind::sensing_pdd, p).period() ==
        doctest::Approx(3 * (8 * p.tau + 4 * p.t_pi)));
  p.t_pi = 0.2;
  CHECK_THROWS_AS(build_schedule(ScheduleKind::sensing_df, p), ConstructionError);
}

TEST_CASE("schedule validation and expansion") {
  FloquetSchedule s;
  CHECK_THROWS_AS(s.validate(), ConstructionError);
  s.segments.push_back({0.0, 1.0, 0.0, 0.0, SegmentKind::continuous, 0.0});
  CHECK_THROWS_AS(s.validate(), ConstructionError);
  s.segments[0].duration = 0.1;
  s.segments[0].kind = SegmentKind::pi_pulse;
  CHECK_THROWS_AS(s.validate(), ConstructionError);
  s.segments[0].rabi = kPi / 0.1;
  CHECK_NOTHROW(s.validate());

  const auto pieces = expand_period(s, true);
  REQUIRE(pieces.size() == 3);
  CHECK(pieces[1].instant_rotation);
  CHECK(!pieces[0].drive_on);
  CHECK(pieces[0].duration + pieces[2].duration == doctest::Approx(0.1));
  CHECK(expand_period(s, false).size() == 1);
  CHECK(schedule_kind_from_string("sensing_pdd") == ScheduleKind::sensing_pdd);
  CHECK_THROWS_AS(schedule_kind_from_string("nope"), PreconditionError);
}

}
