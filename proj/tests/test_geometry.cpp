// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "exwave/errors.hpp"
#include "exwave/geometry.hpp"
#include "exwave/grid.hpp"

using namespace exwave;
using namespace exwave::geometry;

namespace {
const std::vector<double> kBumpy{1.0, 0.0, 0.0, 0.3};  // 1 + 0.3 cos(3 theta)
}

TEST_CASE("disk profile basics") {
  const auto prof = build_profile("disk", {1.0}, 256);
  CHECK(prof.R_outer == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(prof.rho(0.7) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(prof.drho(1.3) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(curve_length(prof) == doctest::Approx(2 * M_PI).epsilon(1e-12));
  CHECK(enclosed_area(prof) == doctest::Approx(M_PI).epsilon(1e-12));
}

TEST_CASE("disk normals are radial") {
  const auto prof = build_profile("disk", {1.0}, 256);
  const auto n0 = boundary_normal(prof, 0.0);
  CHECK(n0[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(n0[1]) < 1e-13);
  const auto n1 = boundary_normal(prof, M_PI / 2);
  CHECK(std::abs(n1[0]) < 1e-13);
  CHECK(n1[1] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("normal is unit length and orthogonal to the curve tangent") {
  const auto prof = build_profile("bumpy", kBumpy, 512);
  const double eps = 1e-6;
  for (double th : {0.0, 0.3, 1.1, 2.0, 4.4, 6.0}) {
    const auto n = boundary_normal(prof, th);
    CHECK(std::hypot(n[0], n[1]) == doctest::Approx(1.0).epsilon(1e-12));
    // centered finite-difference tangent of theta -> rho(theta) e_r(theta)
    auto pt = [&](double a) {
      return std::array<double, 2>{prof.rho(a) * std::cos(a),
                                   prof.rho(a) * std::sin(a)};
    };
    const auto pp = pt(th + eps), pm = pt(th - eps);
    const double tx = (pp[0] - pm[0]) / (2 * eps);
    const double ty = (pp[1] - pm[1]) / (2 * eps);
    CHECK(std::abs(n[0] * tx + n[1] * ty) < 1e-6 * std::hypot(tx, ty));
    // outward: points away from the star center
    const auto p = pt(th);
    CHECK(n[0] * p[0] + n[1] * p[1] > 0);
  }
}

TEST_CASE("star-shape margin matches a dense sweep") {
  const auto prof = build_profile("bumpy", kBumpy, 512);
  const double margin = min_star_margin(prof);
  CHECK(margin > 0);
  double oracle = 1e300;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const double th = 2 * M_PI * k / n;
    const double r = prof.rho(th), dr = prof.drho(th);
    oracle = std::min(oracle, r * r / std::sqrt(r * r + dr * dr));
  }
  CHECK(margin == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("negative radius is rejected") {
  CHECK_THROWS_AS(build_profile("bumpy", {1.0, 1.5}, 256), NonPositiveRadius);
}

TEST_CASE("boundary quadrature weights sum to the curve length") {
  const auto disk1 = build_profile("disk", {1.0}, 256);
  double total = 0;
  for (const auto& q : boundary_quadrature(disk1, 64)) total += q.weight;
  CHECK(total == doctest::Approx(2 * M_PI).epsilon(1e-6));

  const auto disk2 = build_profile("disk", {2.0}, 256);
  total = 0;
  for (const auto& q : boundary_quadrature(disk2, 64)) total += q.weight;
  CHECK(total == doctest::Approx(4 * M_PI).epsilon(1e-6));

  const auto bumpy = build_profile("bumpy", kBumpy, 512);
  double t512 = 0, t4096 = 0;
  for (const auto& q : boundary_quadrature(bumpy, 512)) t512 += q.weight;
  for (const auto& q : boundary_quadrature(bumpy, 4096)) t4096 += q.weight;
  CHECK(t512 == doctest::Approx(t4096).epsilon(1e-8));
  CHECK(t512 == doctest::Approx(curve_length(bumpy)).epsilon(1e-8));
}

TEST_CASE("mask classification on the coarse disk") {
  const auto prof = build_profile("disk", {1.0}, 256);
  const auto grid = GridSpec::make(0.5, 2.0);
  const auto mask = build_mask(prof, grid);
  const int c = grid.n_half();
  CHECK(mask.at(c, c) == NodeClass::OBSTACLE);          // (0, 0)
  CHECK(mask.at(c + 3, c) == NodeClass::EXTERIOR);      // (1.5, 0)
  CHECK(mask.at(c + 2, c) == NodeClass::OBSTACLE);      // (1.0, 0), inclusive
  CHECK(mask.n_exterior > 0);
}

TEST_CASE("grid too small for the obstacle") {
  const auto prof = build_profile("disk", {1.0}, 256);
  CHECK_THROWS_AS(build_mask(prof, GridSpec::make(0.25, 0.8)), GridTooSmall);
}

TEST_CASE("obstacle node count approximates the enclosed area") {
  const auto prof = build_profile("bumpy", kBumpy, 512);
  const auto grid = GridSpec::make(0.01, 2.0);
  const auto mask = build_mask(prof, grid);
  long count = 0;
  for (int j = 0; j < mask.nx; ++j)
    for (int i = 0; i < mask.nx; ++i)
      if (mask.at(i, j) == NodeClass::OBSTACLE) ++count;
  const double approx = count * grid.h * grid.h;
  CHECK(approx == doctest::Approx(enclosed_area(prof)).epsilon(0.05));
}

TEST_CASE("classification is position-only and stable under refinement") {
  const auto prof = build_profile("bumpy", kBumpy, 512);
  const auto coarse = build_mask(prof, GridSpec::make(0.2, 2.0));
  const auto fine = build_mask(prof, GridSpec::make(0.1, 2.0));
  const int nc = coarse.nx;
  for (int j = 0; j < nc; ++j)
    for (int i = 0; i < nc; ++i)
      CHECK(coarse.at(i, j) == fine.at(2 * i, 2 * j));
}

TEST_CASE("boundary list covers every exterior node touching the obstacle") {
  const auto prof = build_profile("bumpy", kBumpy, 512);
  const auto grid = GridSpec::make(0.1, 2.0);
  const auto mask = build_mask(prof, grid);
  const int nx = mask.nx;
  std::vector<char> listed(static_cast<std::size_t>(nx) * nx, 0);
  for (const auto& b : mask.boundary) {
    listed[static_cast<std::size_t>(b.j) * nx + b.i] = 1;
    CHECK(std::hypot(b.nx, b.ny) == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int j = 1; j + 1 < nx; ++j)
    for (int i = 1; i + 1 < nx; ++i) {
      if (!mask.exterior(i, j)) continue;
      const bool touches = mask.at(i - 1, j) == NodeClass::OBSTACLE ||
                           mask.at(i + 1, j) == NodeClass::OBSTACLE ||
                           mask.at(i, j - 1) == NodeClass::OBSTACLE ||
                           mask.at(i, j + 1) == NodeClass::OBSTACLE;
      if (touches) CHECK(listed[static_cast<std::size_t>(j) * nx + i] == 1);
    }
}

TEST_CASE("ellipse graph profile") {
  const auto prof = build_profile("ellipse-graph", {1.5, 1.0}, 512);
  CHECK(prof.rho(0.0) == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(prof.rho(M_PI / 2) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(prof.R_outer == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(enclosed_area(prof) == doctest::Approx(1.5 * M_PI).epsilon(1e-8));
}
