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

#include "dfreeze/serialize.hpp"

#include <cmath>

#include <json.hpp>

#include "dfreeze/error.hpp"

namespace dfreeze {

using nlohmann::json;

namespace {

void check_version(const json& j, int expected, const char* what) {
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != expected) {
    throw ValidationError(std::string(what) + ": unsupported or missing schema_version");
  }
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string ensemble_to_json(const SpinEnsemble& e, bool include_couplings, int indent) {
  json j;
  j["schema_version"] = kEnsembleSchemaVersion;
  j["params"] = {{"n", e.params.n},
                 {"density_per_nm3", e.params.density},
                 {"min_distance_nm", e.params.min_distance},
                 {"disorder_width_rad_per_us", e.params.disorder_width},
                 {"seed", e.params.seed},
                 {"j0_rad_per_us_nm3", e.params.j0}};
  json pos = json::array();
  for (const auto& r : e.positions) pos.push_back({r.x(), r.y(), r.z()});
  j["positions_nm"] = pos;
  j["disorder_rad_per_us"] = std::vector<double>(e.disorder.data(), e.disorder.data() + e.disorder.size());
  if (include_couplings) {
    json c = json::array();
    for (int i = 0; i < e.size(); ++i) {
      std::vector<double> row(e.size());
      for (int k = 0; k < e.size(); ++k) row[k] = e.couplings(i, k);
      c.push_back(row);
    }
    j["couplings_rad_per_us"] = c;
  }
  return j.dump(indent);
}

SpinEnsemble ensemble_from_json(const std::string& text) {
  const json j = json::parse(text);
  check_version(j, kEnsembleSchemaVersion, "ensemble");
  std::vector<Eigen::Vector3d> pos;
  for (const auto& r : j.at("positions_nm")) pos.emplace_back(r.at(0), r.at(1), r.at(2));
  const auto& p = j.at("params");
  const auto h = j.at("disorder_rad_per_us").get<std::vector<double>>();
  Eigen::VectorXd dis = Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()));
  SpinEnsemble e = SpinEnsemble::from_positions(std::move(pos), p.at("j0_rad_per_us_nm3").get<double>(), dis);
  e.params.density = p.at("density_per_nm3");
  e.params.min_distance = p.at("min_distance_nm");
  e.params.disorder_width = p.at("disorder_width_rad_per_us");
  e.params.seed = p.at("seed");
  if (j.contains("couplings_rad_per_us")) {
    const auto& c = j["couplings_rad_per_us"];
    for (int i = 0; i < e.size(); ++i) {
      for (int k = 0; k < e.size(); ++k) {
        const double v = c.at(i).at(k);
        if (std::abs(v - e.couplings(i, k)) > 1e-9 * (1.0 + std::abs(v))) {
          throw ValidationError("ensemble: stored couplings disagree with positions");
        }
      }
    }
  }
  return e;
}

std::string schedule_to_json(const FloquetSchedule& s, int indent) {
  json j;
  j["schema_version"] = kScheduleSchemaVersion;
  j["kind"] = to_string(s.kind);
  j["period_us"] = s.period();
  json segs = json::array();
  for (const auto& g : s.segments) {
    segs.push_back({{"duration_us", g.duration},
                    {"rabi_rad_per_us", g.rabi},
                    {"detuning_rad_per_us", g.detuning},
                    {"phase_rad", g.phase},
                    {"kind", g.kind == SegmentKind::pi_pulse ? "pi_pulse" : "continuous"},
                    {"ac_sign", g.ac_sign}});
  }
  j["segments"] = segs;
  if (s.ac) {
    j["ac"] = {{"amplitude_rad_per_us", s.ac->amplitude},
               {"frequency_rad_per_us", s.ac->frequency},
               {"phase_rad", s.ac->phase}};
  }
  return j.dump(indent);
}

FloquetSchedule schedule_from_json(const std::string& text) {
  const json j = json::parse(text);
  check_version(j, kScheduleSchemaVersion, "schedule");
  FloquetSchedule s;
  s.kind = schedule_kind_from_string(j.at("kind"));
  for (const auto& g : j.at("segments")) {
    DriveSegment d;
    d.duration = g.at("duration_us");
    d.rabi = g.at("rabi_rad_per_us");
    d.detuning = g.at("detuning_rad_per_us");
    d.phase = g.at("phase_rad");
    d.kind = g.at("kind").get<std::string>() == "pi_pulse" ? SegmentKind::pi_pulse
                                                           : SegmentKind::continuous;
    d.ac_sign = g.value("ac_sign", 0.0);
    s.segments.push_back(d);
  }
  if (j.contains("ac")) {
    const auto& a = j["ac"];
    s.ac = AcDrive{a.at("amplitude_rad_per_us"), a.at("frequency_rad_per_us"), a.at("phase_rad")};
  }
  s.validate();
  return s;
}

std::string fit_to_json(const FitResult& f, int indent) {
  json j;
  j["model"] = f.model;
  json p = json::object();
  for (const auto& q : f.parameters) p[q.name] = {{"value", finite_or_null(q.value)}, {"sigma", finite_or_null(q.sigma)}};
  j["parameters"] = p;
  j["residual_norm"] = f.residual_norm;
  j["initial_residual_norm"] = f.initial_residual_norm;
  j["converged"] = f.converged;
  j["degenerate"] = f.degenerate;
  if (!f.note.empty()) j["note"] = f.note;
  return j.dump(indent);
}

std::string spectrum_to_json(const Spectrum& s, int indent) {
  json j;
  j["n_samples"] = s.n_samples;
  j["bin_width_MHz"] = s.bin_width_mhz;
  json peaks = json::array();
  for (const auto& p : s.peaks) peaks.push_back({{"frequency_MHz", p.frequency_mhz}, {"amplitude", p.amplitude}});
  j["peaks"] = peaks;
  j["frequency_MHz"] = s.frequency_mhz;
  j["amplitude"] = s.amplitude;
  return j.dump(indent);
}

}  // namespace dfreeze
