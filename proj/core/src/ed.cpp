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

#include "dfreeze/ed.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dfreeze/error.hpp"
#include "dfreeze/units.hpp"

namespace dfreeze::ed {

using cplx = std::complex<double>;
using units::kPi;
using units::kTwoPi;

namespace {

Matrix build(int n, const Eigen::MatrixXd* J, const Eigen::VectorXd* h_i,
             double rabi, double detuning, double phase) {
  const Eigen::Index dim = Eigen::Index(1) << n;
  Matrix H = Matrix::Zero(dim, dim);
  const cplx raise = 0.5 * rabi * std::exp(cplx(0.0, -phase));  // <up|.|down>
  const cplx lower = std::conj(raise);
  for (Eigen::Index b = 0; b < dim; ++b) {
    double diag = 0.0;
    for (int i = 0; i < n; ++i) {
      const double si = (b >> i & 1) ? -0.5 : 0.5;
      diag += (detuning + (h_i ? (*h_i)[i] : 0.0)) * si;
      if (J) {
        for (int j = i + 1; j < n; ++j) {
          const double Jij = (*J)(i, j);
          if (Jij == 0.0) continue;
          const double sj = (b >> j & 1) ? -0.5 : 0.5;
          diag -= Jij * si * sj;
          if (si != sj) H(b ^ (Eigen::Index(1) << i | Eigen::Index(1) << j), b) += 0.5 * Jij;
        }
      }
      if (rabi != 0.0) {
        const Eigen::Index f = b ^ (Eigen::Index(1) << i);
        H(f, b) += (b >> i & 1) ? raise : lower;
      }
    }
    H(b, b) += diag;
  }
  return H;
}

void check_capacity(int n, int capacity) {
  if (n > capacity) {
    std::ostringstream msg;
    msg << "exact diagonalization limited to " << capacity << " spins (got " << n
        << "); use the DTWA backend";
    throw CapacityError(msg.str());
  }
}

int spins_for_dim(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index(1) << n) < dim) ++n;
  if ((Eigen::Index(1) << n) != dim) throw PreconditionError("dimension is not a power of two");
  return n;
}

// Hard pi rotation about (cos phi, sin phi, 0) on every spin:
// -i (cos phi sx + sin phi sy) in Pauli form.
template <typename Derived>
void apply_pi_rotation(Eigen::MatrixBase<Derived>& psi, int n, double phase) {
  const cplx to_up = cplx(0, -1) * std::exp(cplx(0, -phase));   // <up|G|down>
  const cplx to_down = cplx(0, -1) * std::exp(cplx(0, phase));  // <down|G|up>
  for (int i = 0; i < n; ++i) {
    const Eigen::Index bit = Eigen::Index(1) << i;
    for (Eigen::Index b = 0; b < psi.rows(); ++b) {
      if (b & bit) continue;
      for (Eigen::Index c = 0; c < psi.cols(); ++c) {
        const cplx up = psi(b, c);
        const cplx dn = psi(b | bit, c);
        psi(b, c) = to_up * dn;
        psi(b | bit, c) = to_down * up;
      }
    }
  }
}

struct Decomposition {
  Eigen::VectorXd evals;
  Matrix vecs;
};

Decomposition decompose(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix exp_from(const Decomposition& d, double t) {
  Eigen::VectorXcd phase(d.evals.size());
  for (Eigen::Index k = 0; k < d.evals.size(); ++k) phase[k] = std::exp(cplx(0, -d.evals[k] * t));
  return d.vecs * phase.asDiagonal() * d.vecs.adjoint();
}

// Propagator factory shared by state evolution and the Floquet unitary.
class Stepper {
 public:
  Stepper(const SpinEnsemble& e, const FloquetSchedule& s, const Options& opt)
      : ens_(e), sched_(s), opt_(opt), n_(e.size()) {
    check_capacity(n_, opt.capacity);
    sched_.validate();
    if (sched_.ac) {
      sz_diag_.resize(Eigen::Index(1) << n_);
      for (Eigen::Index b = 0; b < sz_diag_.size(); ++b) {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += (b >> i & 1) ? -0.5 : 0.5;
        sz_diag_[b] = s;
      }
    }
  }

  int n() const { return n_; }

  // Applies the piece over [t, t + dt] to every column of psi.
  template <typename Derived>
  void apply(Eigen::MatrixBase<Derived>& psi, const TimelinePiece& p, double t, double dt) {
    const DriveSegment& seg = sched_.segments[p.segment];
    if (p.instant_rotation) {
      apply_pi_rotation(psi, n_, seg.phase);
      return;
    }
    if (dt <= 0.0) return;
    if (sched_.ac && seg.ac_sign != 0.0 && sched_.ac->amplitude != 0.0) {
      const Matrix& H = hamiltonian(p);
      const double cycle = kTwoPi / std::max(sched_.ac->frequency, 1e-12);
      const int nsub = std::max(1, static_cast<int>(std::ceil(dt / (cycle / opt_.ac_substeps_per_cycle) - 1e-9)));
      const double h = dt / nsub;
      for (int k = 0; k < nsub; ++k) {
        const double delta = seg.ac_sign * sched_.ac->at(t + (k + 0.5) * h);
        Matrix Ht = H;
        Ht.diagonal().real() += delta * sz_diag_;
        psi = expm_hermitian(Ht, h) * psi;
      }
      return;
    }
    psi = unitary(p, dt) * psi;
  }

 private:
  int key(const TimelinePiece& p) const { return 2 * p.segment + (p.drive_on ? 1 : 0); }

  const Matrix& hamiltonian(const TimelinePiece& p) {
    auto it = hams_.find(key(p));
    if (it != hams_.end()) return it->second;
    const DriveSegment& s = sched_.segments[p.segment];
    Matrix H = build(n_, &ens_.couplings, &ens_.disorder, p.drive_on ? s.rabi : 0.0,
                     s.detuning, s.phase);
    return hams_.emplace(key(p), std::move(H)).first->second;
  }

  const Matrix& unitary(const TimelinePiece& p, double dt) {
    const auto k = std::make_pair(key(p), std::llround(dt * 1e10));
    auto it = units_.find(k);
    if (it != units_.end()) return it->second;
    auto dit = decomps_.find(key(p));
    if (dit == decomps_.end()) dit = decomps_.emplace(key(p), decompose(hamiltonian(p))).first;
    return units_.emplace(k, exp_from(dit->second, dt)).first->second;
  }

  const SpinEnsemble& ens_;
  FloquetSchedule sched_;
  Options opt_;
  int n_;
  Eigen::VectorXd sz_diag_;
  std::map<int, Matrix> hams_;
  std::map<int, Decomposition> decomps_;
  std::map<std::pair<int, long long>, Matrix> units_;
};

}  // namespace

Matrix hamiltonian_matrix(const SpinEnsemble& e, double rabi, double detuning,
                          double phase, int capacity) {
  check_capacity(e.size(), capacity);
  return build(e.size(), &e.couplings, &e.disorder, rabi, detuning, phase);
}

Matrix total_spin(int n, Observable o) {
  switch (o) {
    case Observable::Sx: return build(n, nullptr, nullptr, 1.0, 0.0, 0.0);
    case Observable::Sy: return build(n, nullptr, nullptr, 1.0, 0.0, kPi / 2);
    case Observable::Sz: return build(n, nullptr, nullptr, 0.0, 1.0, 0.0);
  }
  return {};
}

StateVector product_state(int n, const ProductState& s) {
  const cplx a[2] = {std::cos(s.theta / 2),
                     std::exp(cplx(0, s.phi)) * std::sin(s.theta / 2)};
  const Eigen::Index dim = Eigen::Index(1) << n;
  StateVector psi(dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    cplx v = 1.0;
    for (int i = 0; i < n; ++i) v *= a[b >> i & 1];
    psi[b] = v;
  }
  return psi;
}

Eigen::Vector3d magnetization(const StateVector& psi, int n) {
  double mx = 0.0, my = 0.0, mz = 0.0;
  for (Eigen::Index b = 0; b < psi.size(); ++b) {
    const double p = std::norm(psi[b]);
    for (int i = 0; i < n; ++i) {
      const Eigen::Index bit = Eigen::Index(1) << i;
      if (b & bit) {
        mz -= p;
      } else {
        mz += p;
        const cplx c = std::conj(psi[b]) * psi[b | bit];
        mx += 2 * c.real();
        my += 2 * c.imag();
      }
    }
  }
  return Eigen::Vector3d(mx, my, mz) / n;
}

Matrix expm_hermitian(const Matrix& h, double t) { return exp_from(decompose(h), t); }

MagnetizationSeries evolve(StateVector psi, const SpinEnsemble& ensemble,
                           const FloquetSchedule& schedule,
                           const std::vector<double>& times, const Options& opt,
                           StateVector* final_state) {
  if (!std::is_sorted(times.begin(), times.end())) {
    throw PreconditionError("ed::evolve: sample times must be sorted");
  }
  if (!times.empty() && times.front() < 0.0) {
    throw PreconditionError("ed::evolve: sample times must be non-negative");
  }
  Stepper stepper(ensemble, schedule, opt);
  const int n = stepper.n();
  if (psi.size() != (Eigen::Index(1) << n)) {
    throw PreconditionError("ed::evolve: state dimension does not match ensemble");
  }
  const auto pieces = expand_period(schedule, opt.instantaneous_pulses);
  const double T = schedule.period();
  const double eps = 1e-9;

  MagnetizationSeries out;
  out.reserve(times.size());
  out.metadata["backend"] = "ed";
  out.metadata["schedule"] = to_string(schedule.kind);
  std::size_t idx = 0;
  auto record = [&](double t) {
    const double drift = std::abs(psi.squaredNorm() - 1.0);
    if (drift > opt.norm_tolerance) {
      std::ostringstream msg;
      msg << "ed::evolve: norm drift " << drift << " at t = " << t << " us";
      throw NumericalError(msg.str());
    }
    while (idx < times.size() && times[idx] <= t + eps) {
      out.push(times[idx], magnetization(psi, n));
      ++idx;
    }
  };

  record(0.0);
  for (long period = 0; idx < times.size(); ++period) {
    double t = period * T;
    for (const auto& p : pieces) {
      if (p.instant_rotation) {
        stepper.apply(psi, p, t, 0.0);
        continue;
      }
      const double end = t + p.duration;
      while (t < end - eps) {
        double stop = end;
        if (idx < times.size() && times[idx] < end - eps) stop = times[idx];
        stepper.apply(psi, p, t, stop - t);
        t = stop;
        record(t);
      }
      t = end;
      if (idx >= times.size()) break;
    }
  }
  if (final_state) *final_state = psi;
  return out;
}

MagnetizationSeries propagate(const StateVector& psi, const SpinEnsemble& ensemble,
                              const FloquetSchedule& schedule, int n_periods,
                              int samples_per_period, const Options& opt) {
  if (samples_per_period < 1) throw PreconditionError("propagate: samples_per_period must be >= 1");
  if (n_periods < 0) throw PreconditionError("propagate: n_periods must be >= 0");
  const double T = schedule.period();
  std::vector<double> times;
  const long total = static_cast<long>(n_periods) * samples_per_period;
  times.reserve(total + 1);
  for (long k = 0; k <= total; ++k) {
    const long P = k / samples_per_period;
    const long r = k % samples_per_period;
    times.push_back(P * T + r * T / samples_per_period);
  }
  return evolve(psi, ensemble, schedule, times, opt);
}

Matrix floquet_unitary(const FloquetSchedule& schedule, const SpinEnsemble& ensemble,
                       const Options& opt) {
  Stepper stepper(ensemble, schedule, opt);
  const Eigen::Index dim = Eigen::Index(1) << stepper.n();
  Matrix U = Matrix::Identity(dim, dim);
  double t = 0.0;
  for (const auto& p : expand_period(schedule, opt.instantaneous_pulses)) {
    stepper.apply(U, p, t, p.duration);
    t += p.duration;
  }
  const double err = (U.adjoint() * U - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (err > 1e-9) {
    std::ostringstream msg;
    msg << "floquet_unitary: unitarity error " << err;
    throw NumericalError(msg.str());
  }
  return U;
}

FloquetEigensystem floquet_eigensystem(const Matrix& u) {
  Eigen::ComplexSchur<Matrix> schur(u);
  if (schur.info() != Eigen::Success) throw NumericalError("complex Schur decomposition failed");
  FloquetEigensystem out;
  const auto& T = schur.matrixT();
  out.vectors = schur.matrixU();
  out.quasi_phases.resize(T.rows());
  for (Eigen::Index k = 0; k < T.rows(); ++k) {
    double mu = -std::arg(T(k, k));
    if (mu <= -kPi) mu += kTwoPi;
    out.quasi_phases[k] = mu;
  }
  return out;
}

DiagonalEnsembleResult diagonal_ensemble_average(const StateVector& initial,
                                                 const FloquetEigensystem& eig,
                                                 Observable o) {
  const Eigen::Index dim = eig.vectors.rows();
  if (initial.size() != dim || eig.quasi_phases.size() != dim) {
    throw PreconditionError("diagonal_ensemble_average: dimension mismatch");
  }
  const int n = spins_for_dim(dim);
  const int comp = o == Observable::Sx ? 0 : (o == Observable::Sy ? 1 : 2);
  const Eigen::VectorXcd c = eig.vectors.adjoint() * initial;

  DiagonalEnsembleResult r;
  for (Eigen::Index k = 0; k < dim; ++k) {
    const StateVector v = eig.vectors.col(k);
    r.value += std::norm(c[k]) * magnetization(v, n)[comp] * n / 2.0;
  }
  std::vector<double> mu(eig.quasi_phases.data(), eig.quasi_phases.data() + dim);
  std::sort(mu.begin(), mu.end());
  r.min_gap = dim > 1 ? kTwoPi - (mu.back() - mu.front()) : kTwoPi;
  for (std::size_t k = 1; k < mu.size(); ++k) r.min_gap = std::min(r.min_gap, mu[k] - mu[k - 1]);
  r.degenerate = r.min_gap < 1e-10;
  return r;
}

}  // namespace dfreeze::ed
