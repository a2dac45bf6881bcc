// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "exwave/grid.hpp"

namespace exwave::geometry {

// Star-shaped obstacle given as a radial graph r = rho(theta).  rho is a
// truncated cosine series; the sample table is derived from it and kept for
// serialization and R_outer.
struct ObstacleProfile {
  std::string kind;            // disk | ellipse-graph | bumpy
  std::vector<double> coeffs;  // rho(t) = coeffs[0] + sum_m coeffs[m] * cos(m t)
  int n_theta = 0;
  std::vector<double> theta_samples;  // n_theta + 1 entries, last == first + 2pi
  std::vector<double> rho_samples;    // matching rho values (closed table)
  double R_outer = 0;

  double rho(double t) const;
  double drho(double t) const;  // d rho / d theta
};

struct QuadratureNode {
  std::array<double, 2> point;
  std::array<double, 2> normal;
  double weight;
};

// kind = "disk": coeffs = {radius}
// kind = "ellipse-graph": coeffs = {a, b}, semi-axes of x1^2/a^2 + x2^2/b^2 = 1
// kind = "bumpy": coeffs = cosine series {c0, c1, ...}
ObstacleProfile build_profile(const std::string& kind,
                              const std::vector<double>& coeffs,
                              int n_theta = 512);

std::array<double, 2> boundary_normal(const ObstacleProfile& profile, double theta);

Mask build_mask(const ObstacleProfile& profile, const GridSpec& grid);

std::vector<QuadratureNode> boundary_quadrature(const ObstacleProfile& profile, int n);

// min over a dense theta sweep of x . N = rho^2 / sqrt(rho^2 + rho'^2)
double min_star_margin(const ObstacleProfile& profile, int n_sweep = 100000);

double curve_length(const ObstacleProfile& profile);
double enclosed_area(const ObstacleProfile& profile);

} // namespace exwave::geometry
