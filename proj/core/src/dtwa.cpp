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

#include "dfreeze/dtwa.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/Geometry>

#include "dfreeze/error.hpp"

namespace dfreeze::dtwa {

const std::array<Eigen::Vector3d, 4>& PhasePointTable::vectors() {
  static const std::array<Eigen::Vector3d, 4> r = {
      Eigen::Vector3d(1, 1, 1), Eigen::Vector3d(-1, -1, 1),
      Eigen::Vector3d(1, -1, -1), Eigen::Vector3d(-1, 1, -1)};
  return r;
}

Eigen::Matrix2cd PhasePointTable::phase_point_operator(int alpha) {
  const Eigen::Vector3d& r = vectors().at(alpha);
  using c = std::complex<double>;
  Eigen::Matrix2cd A;
  A << c(1 + r.z(), 0), c(r.x(), -r.y()), c(r.x(), r.y()), c(1 - r.z(), 0);
  return A / 2.0;
}

std::array<double, 4> wigner_weights(const Eigen::Vector3d& b) {
  std::array<double, 4> w{};
  const auto& r = PhasePointTable::vectors();
  for (int a = 0; a < 4; ++a) w[a] = (1.0 + r[a].dot(b)) / 4.0;
  return w;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t trajectory_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

namespace {

// Inverse-CDF sampler over the phase points for one Bloch vector.
struct PhasePointSampler {
  std::array<double, 4> cdf{};
  double total = 0.0;
  bool rotate = false;
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();

  explicit PhasePointSampler(const Eigen::Vector3d& b) {
    auto w = wigner_weights(b);
    rotate = *std::min_element(w.begin(), w.end()) < -1e-12;
    if (rotate) {
      R = Eigen::Quaterniond::FromTwoVectors(Eigen::Vector3d::UnitZ(), b).toRotationMatrix();
      w = wigner_weights(Eigen::Vector3d::UnitZ());
    }
    for (int a = 0; a < 4; ++a) cdf[a] = (total += std::max(0.0, w[a]));
  }

  Eigen::Vector3d operator()(double u) const {
    int a = 0;
    while (a < 3 && u >= cdf[a]) ++a;
    const auto& r = PhasePointTable::vectors();
    return rotate ? Eigen::Vector3d(R * r[a]) : r[a];
  }
};

}  // namespace

TrajectoryBatch sample_initial(const ProductState& state, int n, int n_traj,
                               std::uint64_t seed, FrameSampling frames) {
  if (n < 1) throw PreconditionError("sample_initial: n must be >= 1");
  if (n_traj < 1) throw PreconditionError("sample_initial: n_traj must be >= 1");
  const Eigen::Vector3d b = state.bloch();
  const Eigen::Vector3d mirror(1.0, -1.0, 1.0);
  const PhasePointSampler direct(b);
  // Mirror frame: sample the reflected state in the fixed frame, reflect back.
  const PhasePointSampler reflected(b.cwiseProduct(mirror));
  const bool paired = frames == FrameSampling::mirrored_pairs;

  TrajectoryBatch out;
  out.n = n;
  out.n_traj = n_traj;
  out.seed = seed;
  out.state = state;
  out.sx.resize(n, n_traj);
  out.sy.resize(n, n_traj);
  out.sz.resize(n, n_traj);
  for (int k = 0; k < n_traj; ++k) {
    const bool mirrored = paired && k % 2 == 1;
    const std::uint64_t stream = paired ? static_cast<std::uint64_t>(k / 2) : static_cast<std::uint64_t>(k);
    std::mt19937_64 rng(trajectory_seed(seed, stream));
    const PhasePointSampler& sampler = mirrored ? reflected : direct;
    std::uniform_real_distribution<double> unit(0.0, sampler.total);
    for (int i = 0; i < n; ++i) {
      Eigen::Vector3d v = sampler(unit(rng));
      if (mirrored) v = v.cwiseProduct(mirror);
      out.sx(i, k) = v.x();
      out.sy(i, k) = v.y();
      out.sz(i, k) = v.z();
    }
  }
  return out;
}

Eigen::Matrix3Xd classical_eom(const Eigen::Matrix3Xd& s, const SpinEnsemble& e,
                               const DriveSegment& seg, double ac) {
  const int n = e.size();
  if (s.cols() != n) throw PreconditionError("classical_eom: configuration size mismatch");
  const Eigen::Matrix3Xd mf = s * e.couplings;  // column i: sum_j J_ij sigma_j
  Eigen::Matrix3Xd d(3, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d B(seg.rabi * std::cos(seg.phase) + 0.5 * mf(0, i),
                            seg.rabi * std::sin(seg.phase) + 0.5 * mf(1, i),
                            seg.detuning + e.disorder[i] + ac - 0.5 * mf(2, i));
    d.col(i) = B.cross(s.col(i).eval());
  }
  return d;
}

namespace {

// State of a block of B trajectories as an n x 3B matrix [X | Y | Z].
class BlockIntegrator {
 public:
  BlockIntegrator(const SpinEnsemble& e, const FloquetSchedule& sched, int B)
      : e_(e), sched_(sched), n_(e.size()), B_(B) {
    M_.resize(n_, 3 * B_);
    for (auto* m : {&k1_, &k2_, &k3_, &k4_, &tmp_}) m->resize(n_, 3 * B_);
  }

  // d/dt of S under the piece's Hamiltonian at absolute time t.
  void rhs(const Eigen::MatrixXd& S, Eigen::MatrixXd& D, const DriveSegment& seg,
           bool drive_on, double t) {
    M_.noalias() = e_.couplings * S;
    const double rabi = drive_on ? seg.rabi : 0.0;
    const double bx0 = rabi * std::cos(seg.phase);
    const double by0 = rabi * std::sin(seg.phase);
    double bz0 = seg.detuning;
    if (sched_.ac && seg.ac_sign != 0.0) bz0 += seg.ac_sign * sched_.ac->at(t);
    const double* h = e_.disorder.data();
    for (int c = 0; c < B_; ++c) {
      const double* X = S.col(c).data();
      const double* Y = S.col(B_ + c).data();
      const double* Z = S.col(2 * B_ + c).data();
      const double* MX = M_.col(c).data();
      const double* MY = M_.col(B_ + c).data();
      const double* MZ = M_.col(2 * B_ + c).data();
      double* dX = D.col(c).data();
      double* dY = D.col(B_ + c).data();
      double* dZ = D.col(2 * B_ + c).data();
      for (int i = 0; i < n_; ++i) {
        const double bx = bx0 + 0.5 * MX[i];
        const double by = by0 + 0.5 * MY[i];
        const double bz = bz0 + h[i] - 0.5 * MZ[i];
        dX[i] = by * Z[i] - bz * Y[i];
        dY[i] = bz * X[i] - bx * Z[i];
        dZ[i] = bx * Y[i] - by * X[i];
      }
    }
  }

  void rk4(Eigen::MatrixXd& S, const DriveSegment& seg, bool drive_on, double t,
           double h) {
    rhs(S, k1_, seg, drive_on, t);
    tmp_ = S + (0.5 * h) * k1_;
    rhs(tmp_, k2_, seg, drive_on, t + 0.5 * h);
    tmp_ = S + (0.5 * h) * k2_;
    rhs(tmp_, k3_, seg, drive_on, t + 0.5 * h);
    tmp_ = S + h * k3_;
    rhs(tmp_, k4_, seg, drive_on, t + h);
    S += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

  void rotate(Eigen::MatrixXd& S, double phase) {
    const double ax = std::cos(phase), ay = std::sin(phase);
    auto X = S.leftCols(B_);
    auto Y = S.middleCols(B_, B_);
    auto Z = S.rightCols(B_);
    const Eigen::MatrixXd proj = ax * X + ay * Y;
    X = 2.0 * ax * proj - X;
    Y = 2.0 * ay * proj - Y;
    Z = -Z;
  }

 private:
  const SpinEnsemble& e_;
  const FloquetSchedule& sched_;
  int n_;
  int B_;
  Eigen::MatrixXd M_, k1_, k2_, k3_, k4_, tmp_;
};

struct BlockResult {
  // Per sample: sums of the spin-averaged component and of its square.
  std::vector<Eigen::Vector3d> sum, sumsq;
};

}  // namespace

MagnetizationSeries evolve(const TrajectoryBatch& batch, const SpinEnsemble& ensemble,
                           const FloquetSchedule& schedule,
                           const std::vector<double>& times, const Options& opt) {
  schedule.validate();
  if (batch.n != ensemble.size()) throw PreconditionError("dtwa::evolve: batch and ensemble sizes differ");
  if (!std::is_sorted(times.begin(), times.end())) throw PreconditionError("dtwa::evolve: sample times must be sorted");
  if (!times.empty() && times.front() < 0.0) throw PreconditionError("dtwa::evolve: sample times must be non-negative");

  const double T = schedule.period();
  const double dt = opt.dt > 0.0 ? opt.dt : T / 400.0;
  const auto pieces = expand_period(schedule, opt.instantaneous_pulses);
  const int n = batch.n;
  const int block = std::max(1, std::min(opt.batch_size, batch.n_traj));
  const int n_blocks = (batch.n_traj + block - 1) / block;
  const std::size_t ns = times.size();
  const double eps = 1e-9;

  std::vector<BlockResult> results(n_blocks);

  auto run_block = [&](int bi) {
    const int first = bi * block;
    const int B = std::min(block, batch.n_traj - first);
    Eigen::MatrixXd S(n, 3 * B);
    S.leftCols(B) = batch.sx.middleCols(first, B);
    S.middleCols(B, B) = batch.sy.middleCols(first, B);
    S.rightCols(B) = batch.sz.middleCols(first, B);
    const Eigen::ArrayXXd len0 = (S.leftCols(B).array().square() + S.middleCols(B, B).array().square() +
                                  S.rightCols(B).array().square()).sqrt();
    BlockIntegrator integ(ensemble, schedule, B);
    BlockResult res;
    res.sum.assign(ns, Eigen::Vector3d::Zero());
    res.sumsq.assign(ns, Eigen::Vector3d::Zero());
    std::size_t idx = 0;
    int current_segment = 0;

    auto record = [&](double t) {
      if (idx >= ns || times[idx] > t + eps) return;
      const Eigen::ArrayXXd len = (S.leftCols(B).array().square() + S.middleCols(B, B).array().square() +
                                   S.rightCols(B).array().square()).sqrt();
      const double drift = (len - len0).abs().maxCoeff();
      if (!(drift <= opt.norm_tolerance)) {
        std::ostringstream msg;
        msg << "dtwa::evolve: spin length drift " << drift << " at t = " << t
            << " us in segment " << current_segment << "; reduce dt";
        throw NumericalError(msg.str());
      }
      while (idx < ns && times[idx] <= t + eps) {
        for (int c = 0; c < 3; ++c) {
          const Eigen::VectorXd v = S.middleCols(c * B, B).colwise().mean().transpose();
          res.sum[idx][c] += v.sum();
          res.sumsq[idx][c] += v.squaredNorm();
        }
        ++idx;
      }
    };

    record(0.0);
    for (long period = 0; idx < ns; ++period) {
      double t = period * T;
      for (const auto& p : pieces) {
        const DriveSegment& seg = schedule.segments[p.segment];
        current_segment = p.segment;
        if (p.instant_rotation) {
          integ.rotate(S, seg.phase);
          continue;
        }
        const double end = t + p.duration;
        const double rate = p.drive_on ? std::abs(seg.rabi) : 0.0;
        const double hmax = rate > 0.0 ? std::min(dt, 0.1 / rate) : dt;
        while (t < end - eps) {
          double stop = end;
          if (idx < ns && times[idx] < end - eps) stop = times[idx];
          const double span = stop - t;
          const int steps = std::max(1, static_cast<int>(std::ceil(span / hmax - 1e-9)));
          const double h = span / steps;
          for (int k = 0; k < steps; ++k) integ.rk4(S, seg, p.drive_on, t + k * h, h);
          t = stop;
          record(t);
        }
        t = end;
        if (idx >= ns) break;
      }
    }
    results[bi] = std::move(res);
  };

  int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n_blocks));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int bi = next++; bi < n_blocks; bi = next++) {
      try {
        run_block(bi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_blocks;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  MagnetizationSeries out;
  out.reserve(ns);
  out.metadata["backend"] = "dtwa";
  out.metadata["schedule"] = to_string(schedule.kind);
  out.metadata["seed"] = std::to_string(batch.seed);
  out.metadata["n_traj"] = std::to_string(batch.n_traj);
  {
    std::ostringstream d;
    d << dt;
    out.metadata["dt_us"] = d.str();
  }
  const double N = batch.n_traj;
  for (std::size_t s = 0; s < ns; ++s) {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero(), sumsq = Eigen::Vector3d::Zero();
    for (const auto& r : results) {
      sum += r.sum[s];
      sumsq += r.sumsq[s];
    }
    const Eigen::Vector3d mean = sum / N;
    Eigen::Vector3d err = Eigen::Vector3d::Zero();
    if (batch.n_traj > 1) {
      for (int c = 0; c < 3; ++c) {
        const double var = std::max(0.0, (sumsq[c] - N * mean[c] * mean[c]) / (N - 1));
        err[c] = std::sqrt(var / N);
      }
    }
    out.push(times[s], mean, err);
  }
  return out;
}

}  // namespace dfreeze::dtwa
