// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
//
// Config plumbing, experiment drivers, artifact layout, report rendering.

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "exwave/cli.hpp"
#include "exwave/errors.hpp"
#include "exwave/io.hpp"

using namespace exwave;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path("cli_test_out") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json base_config(const std::string& experiment, const fs::path& out) {
  json j;
  j["experiment"] = experiment;
  j["obstacle"] = nullptr;
  j["p"] = 3.0;
  j["grid"] = {{"h", 0.25}, {"L", 2.0}};
  j["initial"] = {{"kind", "gaussian"}, {"amplitude", 0.0}};
  j["T_final"] = 1.0;
  j["snapshots"] = {{"mode", "uniform"}, {"dt", 0.5}};
  j["out_dir"] = out.string();
  return j;
}

} // namespace

TEST_CASE("config json round trip is a fixed point") {
  json j;
  j["experiment"] = "decay";
  j["obstacle"] = {{"kind", "bumpy"}, {"coeffs", {1.0, 0.0, 0.2}}, {"n_theta", 256}};
  j["p"] = 4.0;
  j["grid"] = {{"h", 0.05}, {"L", 24.0}, {"lambda", 0.45}};
  j["initial"] = {{"kind", "ring"}, {"radius", 5.0}, {"width", 0.3},
                  {"amplitude", 2.0}, {"phit_amplitude", 0.5}};
  j["T_final"] = 50.0;
  j["snapshots"] = {{"mode", "geometric"}, {"t0", 2.0}, {"ratio", 1.5}};
  j["out_dir"] = "somewhere";
  j["seed"] = 99;
  j["workers"] = 2;
  j["extra"] = {{"fit_t_min", 5.0}, {"note", "keep me"}};

  const cli::RunConfig c = cli::config_from_json(j);
  CHECK(c.experiment == "decay");
  CHECK(c.obstacle_kind == "bumpy");
  CHECK(c.obstacle_coeffs == std::vector<double>{1.0, 0.0, 0.2});
  CHECK(c.p == 4.0);
  CHECK(c.h == 0.05);
  CHECK(c.lambda == 0.45);
  CHECK(c.initial.kind == "ring");
  CHECK(c.initial.phit_amplitude == 0.5);
  CHECK(c.snapshot_ratio == 1.5);
  CHECK(c.extra["note"] == "keep me");

  const json j2 = cli::config_to_json(c);
  const json j3 = cli::config_to_json(cli::config_from_json(j2));
  CHECK(j2 == j3);
}

TEST_CASE("missing obstacle serializes as null and stays off") {
  json j = base_config("simulate", "x");
  const cli::RunConfig c = cli::config_from_json(j);
  CHECK_FALSE(c.has_obstacle);
  CHECK(cli::config_to_json(c)["obstacle"].is_null());
}

TEST_CASE("snapshot schedules") {
  cli::RunConfig c;
  c.T_final = 2.0;
  c.snapshot_dt = 0.5;
  CHECK(c.snapshot_times() == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});

  c.snapshot_mode = "geometric";
  c.snapshot_t0 = 1.0;
  c.snapshot_ratio = 2.0;
  c.T_final = 10.0;
  CHECK(c.snapshot_times() == std::vector<double>{0.0, 1.0, 2.0, 4.0, 8.0, 10.0});

  c.snapshot_ratio = 1.0;
  CHECK_THROWS_AS(c.snapshot_times(), ConfigInvalid);
  c.snapshot_mode = "uniform";
  c.snapshot_dt = 0.0;
  CHECK_THROWS_AS(c.snapshot_times(), ConfigInvalid);
}

TEST_CASE("config validation rejects malformed input") {
  const fs::path out = "unused";
  CHECK_THROWS_AS(cli::config_from_json(json{{"bogus_key", 1}}), ConfigInvalid);
  CHECK_THROWS_AS(cli::config_from_json(json{{"experiment", "warp"}}),
                  ConfigInvalid);
  CHECK_THROWS_AS(cli::config_from_json(json{{"workers", 0}}), ConfigInvalid);
  CHECK_THROWS_AS(cli::config_from_json(json{{"T_final", -1.0}}), ConfigInvalid);
  CHECK_THROWS_AS(cli::config_from_json(json{{"extra", 7}}), ConfigInvalid);
  CHECK_THROWS_AS(
      cli::config_from_json(json{{"grid", {{"h", 0.1}, {"stray", 1}}}}),
      ConfigInvalid);
  CHECK_THROWS_AS(
      cli::config_from_json(json{{"snapshots", {{"mode", "randomly"}}}}),
      ConfigInvalid);
  json ok = base_config("simulate", out);
  CHECK_NOTHROW(cli::config_from_json(ok));
}

TEST_CASE("overrides parse values as json with string fallback") {
  json j = base_config("simulate", "x");
  cli::apply_override(j, "grid.h=0.05");
  CHECK(j["grid"]["h"] == 0.05);
  cli::apply_override(j, "initial.kind=ring");
  CHECK(j["initial"]["kind"] == "ring");
  cli::apply_override(j, "obstacle.coeffs=[1.0,0.25]");
  CHECK(j["obstacle"]["coeffs"] == json::array({1.0, 0.25}));
  cli::apply_override(j, "extra.levels=4");
  CHECK(j["extra"]["levels"] == 4);
  cli::apply_override(j, "extra.label=h over 2");
  CHECK(j["extra"]["label"] == "h over 2");
  CHECK_THROWS_AS(cli::apply_override(j, "no_equals_sign"), ConfigInvalid);
  CHECK_THROWS_AS(cli::apply_override(j, "=5"), ConfigInvalid);
}

TEST_CASE("simulate with zero data writes zero series and faithful metadata") {
  const fs::path out = fresh_dir("zero_sim");
  const cli::RunConfig c = cli::config_from_json(base_config("simulate", out));
  REQUIRE(cli::run(c) == 0);
  REQUIRE(fs::exists(out / "series.csv"));
  REQUIRE(fs::exists(out / "run_meta.json"));

  const auto rows = io::read_csv((out / "series.csv").string());
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"t", "name", "value"});
  for (std::size_t k = 1; k < rows.size(); ++k)
    CHECK(std::stod(rows[k][2]) == 0.0);

  const json meta = io::read_json((out / "run_meta.json").string());
  CHECK(meta["experiment"] == "simulate");
  CHECK(meta["config"] == cli::config_to_json(c));
  CHECK(meta.contains("started_at"));
  CHECK(meta.contains("finished_at"));
}

TEST_CASE("identical configs reproduce series byte for byte") {
  json j;
  j["experiment"] = "simulate";
  j["obstacle"] = {{"kind", "disk"}, {"coeffs", {1.0}}};
  j["p"] = 3.0;
  j["grid"] = {{"h", 0.25}, {"L", 6.0}};
  j["initial"] = {{"kind", "gaussian"}, {"center", {1.5, 0.0}},
                  {"width", 0.4}, {"amplitude", 1.0}};
  j["T_final"] = 1.0;
  j["snapshots"] = {{"mode", "uniform"}, {"dt", 0.25}};

  const fs::path out_a = fresh_dir("rerun_a");
  const fs::path out_b = fresh_dir("rerun_b");
  json ja = j, jb = j;
  ja["out_dir"] = out_a.string();
  jb["out_dir"] = out_b.string();
  REQUIRE(cli::run(cli::config_from_json(ja)) == 0);
  REQUIRE(cli::run(cli::config_from_json(jb)) == 0);

  const std::string a = slurp(out_a / "series.csv");
  const std::string b = slurp(out_b / "series.csv");
  CHECK(a == b);
  CHECK(a.find("energy") != std::string::npos);
}

TEST_CASE("flux experiment artifacts render a positivity verdict") {
  const fs::path out = fresh_dir("flux_small");
  json j = base_config("flux", out);
  j["extra"] = {{"t_max", 5.0}, {"nt", 5}, {"nr", 5},
                {"p_list", {3.0, 4.0}}, {"R", 1.0}};
  REQUIRE(cli::run(cli::config_from_json(j)) == 0);
  REQUIRE(fs::exists(out / "flux_sweep.csv"));

  const json fits = io::read_json((out / "fits.json").string());
  CHECK(double(fits["min_flux"]) >= -1e-10);

  const std::string report = cli::summarize(out.string());
  CHECK(report.find("experiment: flux") != std::string::npos);
  CHECK(report.find("flux positivity: PASS") != std::string::npos);
}

TEST_CASE("summarize requires artifacts") {
  const fs::path out = fresh_dir("empty_dir");
  CHECK_THROWS_AS(cli::summarize(out.string()), MissingArtifacts);
}

TEST_CASE("decay experiment fits the interior sup series") {
  const fs::path out = fresh_dir("decay_smoke");
  json j = base_config("decay", out);
  j["grid"] = {{"h", 0.25}, {"L", 12.0}};
  j["initial"] = {{"kind", "gaussian"}, {"width", 0.5}, {"amplitude", 1.0}};
  j["T_final"] = 8.0;
  j["snapshots"] = {{"mode", "geometric"}, {"t0", 1.0}, {"ratio", 1.3}};
  j["extra"] = {{"fit_t_min", 1.0}, {"fit_t_max", 7.0}};
  REQUIRE(cli::run(cli::config_from_json(j)) == 0);

  const json fits = io::read_json((out / "fits.json").string());
  CHECK(fits.contains("slope"));
  CHECK(fits.contains("r_squared"));
  CHECK(fits["series"] == "sup_interior");
  CHECK(double(fits["predicted_interior"]) == -0.5);

  const std::string report = cli::summarize(out.string());
  CHECK(report.find("interior sup decay:") != std::string::npos);
}

TEST_CASE("spectrum experiment checks the operator against closed forms") {
  const fs::path out = fresh_dir("spectrum_smoke");
  json j = base_config("spectrum", out);
  j["grid"] = {{"h", 0.5}, {"L", 3.0}};
  REQUIRE(cli::run(cli::config_from_json(j)) == 0);

  const json fits = io::read_json((out / "fits.json").string());
  CHECK(double(fits["spectrum_max_rel_err"]) <= 1e-10);
  CHECK(double(fits["quadratic_form_rel_err"]) <= 1e-10);
  CHECK(double(fits["semigroup_rel_err"]) <= 1e-7);

  const std::string report = cli::summarize(out.string());
  CHECK(report.find("box spectrum vs closed form: PASS") != std::string::npos);
  CHECK(report.find("fractional quadratic form: PASS") != std::string::npos);
  CHECK(report.find("fractional semigroup: PASS") != std::string::npos);
}

TEST_CASE("run reports failure through the exit code") {
  const fs::path out = fresh_dir("bad_multiplier");
  json j = base_config("multiplier", out);
  j["extra"] = {{"check", "bogus"}};
  CHECK(cli::run(cli::config_from_json(j)) == 1);
}

TEST_CASE("main entry parses subcommand, overrides and output directory") {
  const fs::path out = fresh_dir("main_entry_flux");
  std::vector<std::string> args = {
      "exwave",        "flux",
      "--out",         out.string(),
      "--set",         "extra.t_max=2.0",
      "--set",         "extra.nt=3",
      "--set",         "extra.nr=3",
      "--set",         "extra.p_list=[5.0]",
  };
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  REQUIRE(cli::main_entry(static_cast<int>(argv.size()), argv.data()) == 0);
  REQUIRE(fs::exists(out / "flux_sweep.csv"));
  const json meta = io::read_json((out / "run_meta.json").string());
  CHECK(meta["config"]["extra"]["nt"] == 3);
  CHECK(meta["config"]["obstacle"].is_null());

  std::vector<std::string> bad = {"exwave", "transmogrify"};
  std::vector<char*> bargv;
  for (auto& a : bad) bargv.push_back(a.data());
  CHECK(cli::main_entry(static_cast<int>(bargv.size()), bargv.data()) != 0);
}

TEST_CASE("csv cells round trip doubles exactly") {
  const fs::path out = fresh_dir("csv_roundtrip");
  const std::string path = (out / "vals.csv").string();
  {
    io::CsvWriter csv(path, {"a", "b"});
    csv.row(std::vector<double>{1.0 / 3.0, -2.5e-17});
  }
  const auto rows = io::read_csv(path);
  REQUIRE(rows.size() == 2);
  CHECK(std::stod(rows[1][0]) == 1.0 / 3.0);
  CHECK(std::stod(rows[1][1]) == -2.5e-17);
  CHECK(io::g17(0.1) == "0.10000000000000001");
}
