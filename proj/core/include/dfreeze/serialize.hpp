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

// JSON round trips for reproducibility records. Documents carry a
// "schema_version" field; readers reject versions they do not know.

#pragma once

#include <string>

#include "dfreeze/ensemble.hpp"
#include "dfreeze/fit.hpp"
#include "dfreeze/protocol.hpp"
#include "dfreeze/spectrum.hpp"

namespace dfreeze {

inline constexpr int kEnsembleSchemaVersion = 1;
inline constexpr int kScheduleSchemaVersion = 1;

std::string ensemble_to_json(const SpinEnsemble& e, bool include_couplings = false,
                             int indent = 2);
/// Positions are authoritative; couplings are recomputed and, when present
/// in the document, checked against the recomputation.
SpinEnsemble ensemble_from_json(const std::string& text);

std::string schedule_to_json(const FloquetSchedule& s, int indent = 2);
FloquetSchedule schedule_from_json(const std::string& text);

std::string fit_to_json(const FitResult& f, int indent = 2);
std::string spectrum_to_json(const Spectrum& s, int indent = 2);

}  // namespace dfreeze
