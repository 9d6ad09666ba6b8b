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

#include "dfreeze/series.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "dfreeze/error.hpp"

namespace dfreeze {

void MagnetizationSeries::reserve(std::size_t n) {
  times.reserve(n);
  m.reserve(n);
  stderr_m.reserve(n);
  valid.reserve(n);
}

void MagnetizationSeries::push(double t, const Eigen::Vector3d& mean,
                               const Eigen::Vector3d& err) {
  times.push_back(t);
  m.push_back(mean);
  stderr_m.push_back(err);
  valid.push_back(1);
}

std::vector<double> MagnetizationSeries::component(int c) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = m[i][c];
  return out;
}

MagnetizationSeries MagnetizationSeries::stroboscopic(double period) const {
  MagnetizationSeries out;
  out.metadata = metadata;
  for (std::size_t i = 0; i < size(); ++i) {
    const double k = std::round(times[i] / period);
    if (std::abs(times[i] - k * period) <= 1e-9 * std::max(1.0, period)) {
      out.times.push_back(times[i]);
      out.m.push_back(m[i]);
      out.stderr_m.push_back(stderr_m[i]);
      out.valid.push_back(valid[i]);
    }
  }
  return out;
}

void MagnetizationSeries::check_invariants() const {
  for (std::size_t i = 1; i < size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw NumericalError("MagnetizationSeries: times not strictly increasing");
    }
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (!valid[i]) continue;
    for (int c = 0; c < 3; ++c) {
      if (std::abs(m[i][c]) > 1.0 + 3.0 * stderr_m[i][c] + 1e-9) {
        std::ostringstream msg;
        msg << "MagnetizationSeries: |m| exceeds 1 at t = " << times[i];
        throw NumericalError(msg.str());
      }
    }
  }
}

void write_csv(std::ostream& os, const MagnetizationSeries& s) {
  os << "time_us,mx,my,mz,mx_stderr,my_stderr,mz_stderr\n";
  os << std::setprecision(12);
  for (std::size_t i = 0; i < s.size(); ++i) {
    os << s.times[i];
    for (int c = 0; c < 3; ++c) os << ',' << s.m[i][c];
    for (int c = 0; c < 3; ++c) os << ',' << s.stderr_m[i][c];
    os << '\n';
  }
}

MagnetizationSeries normalize_reference(const MagnetizationSeries& signal,
                                        const MagnetizationSeries& reference,
                                        double floor) {
  if (signal.size() != reference.size()) {
    throw PreconditionError("normalize_reference: time grids differ in length");
  }
  for (std::size_t i = 0; i < signal.size(); ++i) {
    if (std::abs(signal.times[i] - reference.times[i]) > 1e-9) {
      throw PreconditionError("normalize_reference: time grids differ");
    }
  }
  MagnetizationSeries out = signal;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double r = reference.m[i].z();
    if (!(std::abs(r) >= floor) || !reference.valid[i]) {
      out.valid[i] = 0;
      out.m[i].setConstant(nan);
      out.stderr_m[i].setConstant(nan);
      continue;
    }
    out.m[i] = signal.m[i] / r;
    out.stderr_m[i] = signal.stderr_m[i] / std::abs(r);
  }
  out.metadata["normalized_by"] = "reference_mz";
  return out;
}

double cumulative_time_average(const MagnetizationSeries& s, double t_f,
                               int component) {
  if (s.size() < 2) throw PreconditionError("cumulative_time_average: need two samples");
  const double t0 = s.times.front();
  if (t_f < s.times[1] - 1e-12 || t_f > s.times.back() + 1e-9) {
    throw PreconditionError("cumulative_time_average: t_f outside [t_1, t_end]");
  }
  double area = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double a = s.times[i - 1];
    const double b = s.times[i];
    const double ya = s.m[i - 1][component];
    const double yb = s.m[i][component];
    if (b <= t_f + 1e-12) {
      area += 0.5 * (b - a) * (ya + yb);
      if (b >= t_f - 1e-12) break;
    } else {
      const double w = (t_f - a) / (b - a);
      const double yf = ya + w * (yb - ya);
      area += 0.5 * (t_f - a) * (ya + yf);
      break;
    }
  }
  return area / (t_f - t0);
}

}  // namespace dfreeze
