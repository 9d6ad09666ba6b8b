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

#include <vector>

#include "dfreeze/series.hpp"

namespace dfreeze {

struct SpectrumOptions {
  bool hann = false;
  bool subtract_mean = true;
  // Absolute amplitude a local maximum must exceed to count as a peak.
  double prominence = 1e-9;
};

struct SpectralPeak {
  std::size_t index = 0;
  double frequency_mhz = 0.0;
  double amplitude = 0.0;
};

/// Single-sided amplitude spectrum: a_0 = |X_0|/N, a_k = 2|X_k|/N, and
/// a_{N/2} = |X_{N/2}|/N for even N. A pure tone of amplitude A on an exact
/// bin has a_k = A.
struct Spectrum {
  std::vector<double> frequency_mhz;
  std::vector<double> amplitude;
  std::vector<SpectralPeak> peaks;  // sorted by decreasing amplitude
  std::size_t n_samples = 0;
  double bin_width_mhz = 0.0;
  double signal_energy = 0.0;  // sum of squared (processed) samples

  /// sum |x|^2 reconstructed from the amplitudes (Parseval).
  double parseval_energy() const;
  /// Peak closest to `f_mhz`, or nullptr.
  const SpectralPeak* peak_near(double f_mhz, double tol_mhz) const;
};

/// DFT of uniformly sampled values. Throws PreconditionError when the grid
/// is not uniform (relative spacing deviation above 1e-6).
Spectrum spectrum(const std::vector<double>& times,
                  const std::vector<double>& values,
                  const SpectrumOptions& opt = {});

/// Spectrum of one component restricted to the half-open window [t0, t1).
Spectrum spectrum(const MagnetizationSeries& s, int component, double t0,
                  double t1, const SpectrumOptions& opt = {});

}  // namespace dfreeze
