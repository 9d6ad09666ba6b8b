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

// Unit conventions used throughout the library:
//
//   time               microseconds (us)
//   distance           nanometres (nm)
//   angular frequency  radians per microsecond (rad/us)
//   magnetic field     microtesla (uT)
//
// Every function argument that is a frequency takes the angular value unless
// its name ends in `_mhz`. Configuration files carry ordinary frequencies in
// MHz; `mhz_to_angular` is the only conversion point.

#pragma once

#include <numbers>

namespace dfreeze::units {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Ordinary frequency in MHz -> angular frequency in rad/us.
constexpr double mhz_to_angular(double f_mhz) { return kTwoPi * f_mhz; }

/// Angular frequency in rad/us -> ordinary frequency in MHz.
constexpr double angular_to_mhz(double omega) { return omega / kTwoPi; }

/// Dipolar coupling constant J0 = 2pi x 52 MHz nm^3, in rad/us nm^3.
inline constexpr double kDipolarJ0 = kTwoPi * 52.0;

/// NV electron gyromagnetic ratio 2pi x 28.03 GHz/T, in rad/us per uT.
inline constexpr double kGammaNV = kTwoPi * 28.03e-3;

/// Converts an amplitude in uT*sqrt(us) to nT/sqrt(Hz). The two are equal:
/// 1 uT sqrt(us) = 1e3 nT * 1e-3 sqrt(s).
inline constexpr double kUtSqrtUsToNtPerSqrtHz = 1.0;

}  // namespace dfreeze::units
