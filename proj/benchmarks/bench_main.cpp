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


// Throughput of the hot paths: ED period propagation, Floquet
// diagonalization, the DTWA right-hand side and a full DTWA period.

#include <benchmark/benchmark.h>

#include "dfreeze/dtwa.hpp"
#include "dfreeze/ed.hpp"
#include "dfreeze/ensemble.hpp"
#include "dfreeze/protocol.hpp"
#include "dfreeze/units.hpp"

namespace {

using namespace dfreeze;

SpinEnsemble ensemble(int n) {
  EnsembleParams p;
  p.n = n;
  p.density = 4e-4;
  p.min_distance = 11.0;
  p.seed = 1;
  return sample_ensemble(p);
}

FloquetSchedule toggle() {
  ScheduleParams p;
  p.period = 4.0;
  p.rabi = 2 * units::kPi * 0.1;
  p.detuning = 2 * units::kPi / p.period;
  return build_schedule(ScheduleKind::ideal_toggle, p);
}

void BM_EdPropagate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto e = ensemble(n);
  const auto s = toggle();
  const auto psi = ed::product_state(n, initial_state(0.0, 0.0));
  for (auto _ : state) {
    auto series = ed::propagate(psi, e, s, 10, 1);
    benchmark::DoNotOptimize(series);
  }
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_EdPropagate)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_FloquetEigensystem(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto u = ed::floquet_unitary(toggle(), ensemble(n));
  for (auto _ : state) {
    auto eig = ed::floquet_eigensystem(u);
    benchmark::DoNotOptimize(eig);
  }
}
BENCHMARK(BM_FloquetEigensystem)->DenseRange(6, 8, 2)->Unit(benchmark::kMillisecond);

void BM_ClassicalEom(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto e = ensemble(n);
  const auto s = toggle();
  const auto batch = dtwa::sample_initial(initial_state(0.0, 0.0), n, 1, 3);
  Eigen::Matrix3Xd config(3, n);
  config.row(0) = batch.sx.col(0).transpose();
  config.row(1) = batch.sy.col(0).transpose();
  config.row(2) = batch.sz.col(0).transpose();
  for (auto _ : state) {
    auto d = dtwa::classical_eom(config, e, s.segments.front());
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_ClassicalEom)->RangeMultiplier(4)->Range(16, 256);

void BM_DtwaPeriod(benchmark::State& state) {
  const int n = 100;
  const int n_traj = static_cast<int>(state.range(0));
  const auto e = ensemble(n);
  const auto s = toggle();
  const auto batch = dtwa::sample_initial(initial_state(0.0, 0.0), n, n_traj, 3);
  dtwa::Options opt;
  opt.threads = 1;
  for (auto _ : state) {
    auto series = dtwa::evolve(batch, e, s, {s.period()}, opt);
    benchmark::DoNotOptimize(series);
  }
  state.SetItemsProcessed(state.iterations() * n_traj);
}
BENCHMARK(BM_DtwaPeriod)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
