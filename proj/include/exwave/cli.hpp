// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "exwave/solver.hpp"

namespace exwave::cli {

struct RunConfig {
  std::string experiment = "simulate";  // simulate | convergence | decay |
                                        // scatter | multiplier | flux | spectrum

  bool has_obstacle = true;
  std::string obstacle_kind = "disk";
  std::vector<double> obstacle_coeffs{1.0};
  int n_theta = 512;

  double p = 3.0;
  double h = 0.1;
  double L = 10.0;
  double lambda = 0.5;
  double dt = 0;  // 0 means lambda * h

  solver::InitialSpec initial;
  double T_final = 10.0;

  std::string snapshot_mode = "uniform";  // uniform | geometric
  double snapshot_dt = 0.5;               // uniform spacing
  double snapshot_t0 = 1.0;               // geometric start
  double snapshot_ratio = 1.25;           // geometric ratio

  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int workers = 1;

  nlohmann::json extra;  // experiment-specific knobs, round-tripped verbatim

  std::vector<double> snapshot_times() const;
};

RunConfig config_from_json(const nlohmann::json& j);  // ConfigInvalid
nlohmann::json config_to_json(const RunConfig& c);

// "a.b.c=value": sets j[a][b][c], parsing value as JSON when possible, else
// as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

// Executes the experiment, writes artifacts under out_dir, returns exit code.
int run(const RunConfig& config);

// Reads the artifacts in out_dir and renders the pass/fail table.
std::string summarize(const std::string& out_dir);  // MissingArtifacts

int main_entry(int argc, char** argv);

} // namespace exwave::cli
