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

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dfreeze {

/// Time-stamped per-spin magnetization m = (2/n) <S>, with Monte Carlo
/// standard errors (zero for exact backends).
struct MagnetizationSeries {
  std::vector<double> times;               // us
  std::vector<Eigen::Vector3d> m;
  std::vector<Eigen::Vector3d> stderr_m;
  std::vector<char> valid;                 // 0 marks an invalidated sample
  std::map<std::string, std::string> metadata;

  std::size_t size() const { return times.size(); }
  void reserve(std::size_t n);
  void push(double t, const Eigen::Vector3d& mean,
            const Eigen::Vector3d& err = Eigen::Vector3d::Zero());

  /// One component as a plain vector (0 = x, 1 = y, 2 = z).
  std::vector<double> component(int c) const;

  /// Samples whose time is an integer multiple of `period` (within 1e-9).
  MagnetizationSeries stroboscopic(double period) const;

  /// Checks strictly increasing times and |m| <= 1 + 3 stderr.
  void check_invariants() const;
};

/// CSV with header time_us,mx,my,mz,mx_stderr,my_stderr,mz_stderr.
void write_csv(std::ostream& os, const MagnetizationSeries& s);

/// Componentwise division by the reference m_z. Samples where the reference
/// is below `floor` are marked invalid and set to NaN.
MagnetizationSeries normalize_reference(const MagnetizationSeries& signal,
                                        const MagnetizationSeries& reference,
                                        double floor = 0.05);

/// (1/t_f) \int_0^{t_f} m_c dt by the trapezoidal rule, interpolating the
/// final partial interval linearly. Integration starts at the first sample.
double cumulative_time_average(const MagnetizationSeries& s, double t_f,
                               int component = 2);

}  // namespace dfreeze
