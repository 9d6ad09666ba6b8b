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

#include "dfreeze/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>
#include <sstream>

#include <fftw3.h>

#include "dfreeze/error.hpp"
#include "dfreeze/units.hpp"

namespace dfreeze {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<std::complex<double>> real_dft(std::vector<double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, x.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

double Spectrum::parseval_energy() const {
  const std::size_t N = n_samples;
  if (N == 0) return 0.0;
  double e = 0.0;
  for (std::size_t k = 0; k < amplitude.size(); ++k) {
    const double a = amplitude[k];
    const bool edge = k == 0 || (N % 2 == 0 && k == N / 2);
    e += edge ? a * a : a * a / 2.0;
  }
  return e * static_cast<double>(N);
}

const SpectralPeak* Spectrum::peak_near(double f_mhz, double tol_mhz) const {
  const SpectralPeak* best = nullptr;
  for (const auto& p : peaks) {
    const double d = std::abs(p.frequency_mhz - f_mhz);
    if (d <= tol_mhz && (!best || d < std::abs(best->frequency_mhz - f_mhz))) best = &p;
  }
  return best;
}

Spectrum spectrum(const std::vector<double>& times, const std::vector<double>& values,
                  const SpectrumOptions& opt) {
  if (times.size() != values.size()) throw PreconditionError("spectrum: length mismatch");
  const std::size_t N = times.size();
  if (N < 2) throw PreconditionError("spectrum: need at least two samples");
  const double dt = (times.back() - times.front()) / static_cast<double>(N - 1);
  if (!(dt > 0.0)) throw PreconditionError("spectrum: times must increase");
  for (std::size_t i = 1; i < N; ++i) {
    if (std::abs((times[i] - times[i - 1]) - dt) > 1e-6 * dt) {
      std::ostringstream msg;
      msg << "spectrum: non-uniform sampling near t = " << times[i]
          << " us; resample onto a uniform grid first";
      throw PreconditionError(msg.str());
    }
  }

  std::vector<double> x = values;
  if (opt.subtract_mean) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(N);
    for (auto& v : x) v -= mean;
  }
  if (opt.hann) {
    for (std::size_t i = 0; i < N; ++i) {
      x[i] *= 0.5 * (1.0 - std::cos(units::kTwoPi * static_cast<double>(i) / static_cast<double>(N)));
    }
  }

  Spectrum s;
  s.n_samples = N;
  s.bin_width_mhz = 1.0 / (static_cast<double>(N) * dt);
  for (double v : x) s.signal_energy += v * v;

  const auto X = real_dft(x);
  s.frequency_mhz.resize(X.size());
  s.amplitude.resize(X.size());
  for (std::size_t k = 0; k < X.size(); ++k) {
    s.frequency_mhz[k] = static_cast<double>(k) * s.bin_width_mhz;
    const bool edge = k == 0 || (N % 2 == 0 && k == N / 2);
    s.amplitude[k] = (edge ? 1.0 : 2.0) * std::abs(X[k]) / static_cast<double>(N);
  }

  const auto& a = s.amplitude;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double left = k > 0 ? a[k - 1] : -1.0;
    const double right = k + 1 < a.size() ? a[k + 1] : -1.0;
    if (a[k] > left && a[k] > right && a[k] > opt.prominence) {
      s.peaks.push_back({k, s.frequency_mhz[k], a[k]});
    }
  }
  std::sort(s.peaks.begin(), s.peaks.end(),
            [](const SpectralPeak& p, const SpectralPeak& q) { return p.amplitude > q.amplitude; });
  return s;
}

Spectrum spectrum(const MagnetizationSeries& s, int component, double t0, double t1,
                  const SpectrumOptions& opt) {
  if (t1 <= t0) throw PreconditionError("spectrum: empty window");
  if (s.size() == 0 || t0 < s.times.front() - 1e-9 || t1 > s.times.back() + 1e-6) {
    throw PreconditionError("spectrum: window outside the series span");
  }
  std::vector<double> t, v;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.times[i] >= t0 - 1e-9 && s.times[i] < t1 - 1e-9) {
      t.push_back(s.times[i]);
      v.push_back(s.m[i][component]);
    }
  }
  return spectrum(t, v, opt);
}

}  // namespace dfreeze
