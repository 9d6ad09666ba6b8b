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

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dfreeze/harness/config.hpp"
#include "dfreeze/harness/runner.hpp"

namespace h = dfreeze::harness;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json coherence_config() {
  return json::parse(R"({
    "schema_version": 1,
    "experiment": "coherence_fit",
    "seeds": {"ensemble": [0], "trajectories": 7},
    "coherence": {"synthetic": {"t2_us": 10, "alpha": 0.8, "noise": 0.01, "n_points": 40,
                                "t_min_us": 0.5, "t_max_us": 40}}
  })");
}

json decay_config() {
  return json::parse(R"({
    "schema_version": 1,
    "experiment": "long_time_decay",
    "backend": "ed",
    "seeds": {"ensemble": [1, 2]},
    "ensemble": {"n": 3, "density_per_nm3": 3e-4, "min_distance_nm": 12},
    "schedule": {"kind": "ideal_toggle", "period_us": 2},
    "evolution": {"periods": 40},
    "sweep": {"rabi_MHz": [0.2, 0.3], "detuning_MHz": [1]}
  })");
}

bool has_issue(const std::vector<h::Issue>& v, const std::string& path, const std::string& text) {
  return std::any_of(v.begin(), v.end(), [&](const h::Issue& i) {
    return i.path == path && i.message.find(text) != std::string::npos;
  });
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dfreeze_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

h::RunSummary run_quiet(const h::RunConfig& c, const fs::path& out, int workers) {
  std::ostringstream log;
  h::RunOptions opt;
  opt.workers = workers;
  opt.out_dir = out.string();
  return h::run(c, opt, log);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("valid configurations produce an empty report") {
  for (const auto& j : {coherence_config(), decay_config()}) {
    h::ValidationReport r;
    auto c = h::parse_config(j, r);
    CHECK(c.has_value());
    CHECK(r.errors.empty());
    CHECK(r.warnings.empty());
  }
}

TEST_CASE("bundled example configurations validate") {
  const fs::path dir = fs::path(DFREEZE_SOURCE_DIR) / "tools" / "configs";
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    h::ValidationReport r;
    CHECK_MESSAGE(h::load_config(e.path().string(), r).has_value(), e.path().string(), "\n", r.to_text());
    ++n;
  }
  CHECK(n == static_cast<int>(h::all_experiments().size()));
}

TEST_CASE("angular-looking frequencies are flagged") {
  auto j = decay_config();
  j["sweep"]["rabi_MHz"] = {2 * 3.14159265358979 * 0.2};
  h::ValidationReport r;
  CHECK(h::parse_config(j, r).has_value());
  CHECK(has_issue(r.warnings, "sweep.rabi_MHz", "2"));
}

TEST_CASE("missing seeds are an error") {
  auto j = decay_config();
  j.erase("seeds");
  h::ValidationReport r;
  CHECK_FALSE(h::parse_config(j, r).has_value());
  CHECK(has_issue(r.errors, "seeds", "required"));

  auto d = coherence_config();
  d["seeds"].erase("trajectories");
  h::ValidationReport r2;
  CHECK_FALSE(h::parse_config(d, r2).has_value());
  CHECK(has_issue(r2.errors, "seeds.trajectories", "missing"));
}

TEST_CASE("empty grids and unknown fields are errors") {
  auto j = decay_config();
  j["sweep"]["rabi_MHz"] = {{"start", 1}, {"stop", 0}, {"step", 0.1}};
  j["schedule"]["rabbi_MHz"] = 0.2;
  h::ValidationReport r;
  CHECK_FALSE(h::parse_config(j, r).has_value());
  CHECK(has_issue(r.errors, "sweep.rabi_MHz", "empty sweep grid"));
  CHECK(has_issue(r.errors, "schedule.rabbi_MHz", "unknown field"));
}

TEST_CASE("schema version and ED capacity are enforced") {
  auto j = decay_config();
  j["schema_version"] = 2;
  j["ensemble"]["n"] = 20;
  h::ValidationReport r;
  CHECK_FALSE(h::parse_config(j, r).has_value());
  CHECK(has_issue(r.errors, "schema_version", "expected 1"));
  CHECK(has_issue(r.errors, "ensemble.n", "dtwa"));
}

TEST_CASE("syntax errors are reported, not thrown") {
  const fs::path dir = scratch("syntax");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << "{\"schema_version\": 1,";
  h::ValidationReport r;
  CHECK_FALSE(h::load_config((dir / "bad.json").string(), r).has_value());
  CHECK_FALSE(r.ok());
}

TEST_CASE("grid expansion is inclusive") {
  h::ValidationReport r;
  const auto v = h::expand_axis(json{{"start", 0}, {"stop", 1}, {"step", 0.25}}, "x", r);
  REQUIRE(v.size() == 5);
  CHECK(v.back() == doctest::Approx(1.0));
  CHECK(r.ok());
}

TEST_CASE("reruns reproduce outputs byte for byte across worker counts") {
  h::ValidationReport r;
  const auto c = h::parse_config(decay_config(), r);
  REQUIRE(c);
  const auto a = scratch("rerun_a"), b = scratch("rerun_b");
  const auto sa = run_quiet(*c, a, 1);
  const auto sb = run_quiet(*c, b, 3);
  CHECK(sa.failed_jobs == 0);
  CHECK(sa.inputs_hash == sb.inputs_hash);
  for (const char* f : {"decay_series.csv", "decay_summary.csv", "decay_summary.csv.json"}) {
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    CHECK_FALSE(slurp(a / f).empty());
  }
  const auto m = json::parse(slurp(a / "manifest.json"));
  CHECK(m["inputs_hash"] == sa.inputs_hash);
  CHECK(m["jobs"].size() == 4);
  for (const auto& f : m["files"]) CHECK(f["fnv1a"] == h::fnv1a_hex(slurp(a / f["path"].get<std::string>())));
}

TEST_CASE("seed override changes the hash and the outputs") {
  h::ValidationReport r;
  auto c = h::parse_config(coherence_config(), r);
  REQUIRE(c);
  const auto base = h::inputs_hash(*c);
  const auto a = scratch("seed_a");
  run_quiet(*c, a, 1);
  c->apply_seed_override(99);
  CHECK(c->ensemble_seeds == std::vector<std::uint64_t>{99});
  CHECK(h::inputs_hash(*c) != base);
  const auto b = scratch("seed_b");
  run_quiet(*c, b, 1);
  CHECK(slurp(a / "coherence_data.csv") != slurp(b / "coherence_data.csv"));
}

TEST_CASE("output directory does not enter the inputs hash") {
  h::ValidationReport r;
  auto j = coherence_config();
  const auto c1 = h::parse_config(j, r);
  j["output_dir"] = "somewhere/else";
  const auto c2 = h::parse_config(j, r);
  REQUIRE(c1);
  REQUIRE(c2);
  CHECK(h::inputs_hash(*c1) == h::inputs_hash(*c2));
}

TEST_CASE("failing jobs are recorded with diagnostics") {
  auto j = coherence_config();
  j["coherence"].erase("synthetic");
  j["coherence"]["data_path"] = "/nonexistent/coherence.csv";
  h::ValidationReport r;
  auto c = h::parse_config(j, r);
  if (!c) {
    CHECK(has_issue(r.errors, "coherence.data_path", ""));
    return;
  }
  const auto out = scratch("failing");
  const auto s = run_quiet(*c, out, 1);
  CHECK(s.failed_jobs > 0);
  const auto m = json::parse(slurp(out / "manifest.json"));
  CHECK(m["jobs"][0]["status"] == "failed");
  CHECK_FALSE(m["jobs"][0]["diagnostics"].get<std::string>().empty());
}

TEST_CASE("fnv1a matches reference vectors") {
  CHECK(h::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(h::fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(h::fnv1a_hex("foobar") == "85944171f73967e8");
}

}  // TEST_SUITE
