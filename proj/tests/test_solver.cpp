// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "exwave/errors.hpp"
#include "exwave/geometry.hpp"
#include "exwave/solver.hpp"

using namespace exwave;
using namespace exwave::solver;

namespace {

std::shared_ptr<const Mask> shared_free(int nx) {
  return std::make_shared<const Mask>(free_mask(nx));
}

WaveState gaussian_state(double p, const GridSpec& grid,
                         std::array<double, 2> center = {0, 0},
                         double width = 0.6, double amplitude = 1.0) {
  InitialSpec spec;
  spec.kind = "gaussian";
  spec.center = center;
  spec.width = width;
  spec.amplitude = amplitude;
  return make_initial(spec, make_exponents(p), grid, shared_free(grid.nx()));
}

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0;
  for (std::size_t q = 0; q < a.size(); ++q)
    m = std::max(m, std::abs(a[q] - b[q]));
  return m;
}

} // namespace

TEST_CASE("exponent bookkeeping") {
  const auto e6 = make_exponents(6.0);
  CHECK(e6.p5 == 5.0);
  const auto e3 = make_exponents(3.0);
  CHECK(e3.p5 == 3.0);
  CHECK(e3.sp == 0.0);
  CHECK(e3.thresh_energy ==
        doctest::Approx(2.0 * std::sqrt(5.0) - 1.0).epsilon(1e-15));
  CHECK(e3.thresh_critical ==
        doctest::Approx(1.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(make_exponents(4.0).above_energy_threshold());
  CHECK_FALSE(make_exponents(3.4).above_energy_threshold());
  CHECK(make_exponents(4.0).above_critical_threshold());
  CHECK_FALSE(make_exponents(3.8).above_critical_threshold());
  CHECK(make_exponents(5.0).sp == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(make_exponents(1.0), BadP);
  CHECK_THROWS_AS(make_exponents(0.5), BadP);
}

TEST_CASE("zero data stays zero") {
  const auto grid = GridSpec::make(0.2, 4.0);
  InitialSpec spec;
  spec.kind = "zero";
  auto s = make_initial(spec, make_exponents(3), grid, shared_free(grid.nx()));
  auto traj = evolve(s, 2.0, {2.0}, true);
  for (double v : traj.snapshots.back().phi) CHECK(v == 0.0);
  for (double v : traj.snapshots.back().phit) CHECK(v == 0.0);
}

TEST_CASE("random data is reproducible from the seed") {
  const auto grid = GridSpec::make(0.2, 4.0);
  InitialSpec spec;
  spec.kind = "random_smooth";
  spec.radius = 3.0;
  spec.seed = 42;
  spec.phit_amplitude = 0.5;
  const auto e = make_exponents(3);
  auto a = make_initial(spec, e, grid, shared_free(grid.nx()));
  auto b = make_initial(spec, e, grid, shared_free(grid.nx()));
  CHECK(a.phi == b.phi);
  CHECK(a.phit == b.phit);
  spec.seed = 43;
  auto c = make_initial(spec, e, grid, shared_free(grid.nx()));
  CHECK(max_abs_diff(a.phi, c.phi) > 1e-6);
}

TEST_CASE("plane data reproduces the 1D traveling-wave solution") {
  // data constant in x2; the five-point scheme then reduces to the 1D
  // three-point scheme on every row until the frozen box edge contaminates
  // rows inward, one row per step.  80 steps < n_half = 120 keeps the
  // middle band exact.
  const auto grid = GridSpec::make(0.1, 12.0);
  const int nx = grid.nx(), c = grid.n_half();
  WaveState s;
  s.grid = grid;
  s.mask = shared_free(nx);
  s.exponents = make_exponents(3);
  s.phi.assign(static_cast<std::size_t>(nx) * nx, 0.0);
  s.phit.assign(s.phi.size(), 0.0);
  auto f = [](double x) { return std::exp(-0.5 * x * x); };
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nx; ++i) s.at(s.phi, i, j) = f(grid.coord(i));

  const double T = 4.0;
  auto traj = evolve(s, T, {T}, false);
  const auto& fin = traj.snapshots.back();

  // rows inside the uncontaminated band are bitwise identical
  for (int off : {-20, 20})
    for (int i = 0; i < nx; ++i)
      CHECK(fin.phi_at(i, c + off) == fin.phi_at(i, c));

  // middle row against the half-sum of shifted profiles
  double err = 0;
  for (int i = 0; i < nx; ++i) {
    const double x = grid.coord(i);
    err = std::max(err, std::abs(fin.phi_at(i, c) -
                                 0.5 * (f(x - T) + f(x + T))));
  }
  CHECK(err < 6e-3);
  CHECK(fin.phi_at(c, c) < 0.05);  // the profile has left the center
}

TEST_CASE("velocity-Verlet run is time reversible") {
  const auto prof = geometry::build_profile("disk", {1.0}, 256);
  const auto grid = GridSpec::make(0.1, 6.0);
  auto mask = std::make_shared<const Mask>(geometry::build_mask(prof, grid));
  InitialSpec spec;
  spec.kind = "gaussian";
  spec.center = {2.5, 0.0};
  spec.width = 0.5;
  const auto e = make_exponents(3);
  auto s0 = make_initial(spec, e, grid, mask, &prof);
  auto traj = evolve(s0, 2.0, {2.0}, true);
  WaveState back = traj.snapshots.back();
  for (double& v : back.phit) v = -v;
  back.t = 0;
  auto rev = evolve(back, 2.0, {2.0}, true);
  CHECK(max_abs_diff(rev.snapshots.back().phi, s0.phi) < 1e-9);
}

TEST_CASE("finite propagation speed") {
  InitialSpec spec;
  spec.kind = "random_smooth";
  spec.radius = 2.0;
  spec.seed = 7;
  spec.phit_amplitude = 1.0;
  const auto e = make_exponents(3);
  const double T = 3.0;

  const auto big = GridSpec::make(0.1, 8.0);
  auto s0 = make_initial(spec, e, big, shared_free(big.nx()));
  const double a = support_radius(s0, 0.0);
  CHECK(a <= 2.0 + 1e-12);
  auto traj = evolve(s0, T, {T}, true);
  const auto& fin = traj.snapshots.back();
  // stencil cone: the l1 reach is one cell per step
  const long n_steps = std::lround(T / big.dt);
  CHECK(support_radius(fin, 0.0) <= a + n_steps * big.h + 1e-9);

  // box independence: a smaller box gives bitwise identical values at nodes
  // the edge cannot influence within T
  const auto small = GridSpec::make(0.1, 6.0);
  auto s0s = make_initial(spec, e, small, shared_free(small.nx()));
  auto fins = evolve(s0s, T, {T}, true).snapshots.back();
  const int shift = big.n_half() - small.n_half();
  for (int j = 0; j < small.nx(); ++j)
    for (int i = 0; i < small.nx(); ++i) {
      if (std::max(std::abs(small.coord(i)), std::abs(small.coord(j))) > 3.5)
        continue;
      CHECK(fins.phi_at(i, j) == fin.phi_at(i + shift, j + shift));
    }
}

TEST_CASE("Dirichlet values stay exactly zero") {
  const auto prof = geometry::build_profile("bumpy", {1.0, 0.0, 0.0, 0.3}, 512);
  const auto grid = GridSpec::make(0.1, 6.0);
  auto mask = std::make_shared<const Mask>(geometry::build_mask(prof, grid));
  InitialSpec spec;
  spec.kind = "gaussian";
  spec.center = {3.0, 0.5};
  spec.width = 0.5;
  auto s0 = make_initial(spec, make_exponents(4), grid, mask, &prof);
  auto traj = evolve(s0, 3.0, {1.0, 2.0, 3.0}, true);
  const int nx = grid.nx();
  for (const auto& s : traj.snapshots)
    for (int j = 0; j < nx; ++j)
      for (int i = 0; i < nx; ++i)
        if (mask->at(i, j) == NodeClass::OBSTACLE) {
          CHECK(s.phi_at(i, j) == 0.0);
          CHECK(s.phit_at(i, j) == 0.0);
        }
}

TEST_CASE("discrete energy is exactly conserved by the linear scheme") {
  const auto grid = GridSpec::make(0.1, 6.0);
  auto s0 = gaussian_state(3, grid);
  const double e0 = discrete_energy(s0, false);
  auto traj = evolve(s0, 3.0, {3.0}, false);
  const double e1 = discrete_energy(traj.snapshots.back(), false);
  CHECK(std::abs(e1 - e0) < 1e-12 * e0);
}

TEST_CASE("discrete energy drift is small for the nonlinear scheme") {
  auto drift_at = [](double h) {
    const auto grid = GridSpec::make(h, 6.0);
    auto s0 = gaussian_state(3, grid);
    const double e0 = discrete_energy(s0, true);
    auto traj = evolve(s0, 3.0, {3.0}, true);
    return std::abs(discrete_energy(traj.snapshots.back(), true) - e0) / e0;
  };
  const double d1 = drift_at(0.1);
  CHECK(d1 < 2e-3);
  CHECK(drift_at(0.05) < d1 / 2.5);  // drift shrinks with dt^2
}

TEST_CASE("linear propagator basics") {
  const auto grid = GridSpec::make(0.2, 4.0);
  auto s0 = gaussian_state(3, grid);
  s0.t = 5.0;  // offsets are relative to the state's own time
  auto traj = linear_propagate(s0, 1.0, {0.0, 1.0});
  CHECK(traj.snapshots.front().t == doctest::Approx(5.0));
  CHECK(traj.snapshots.front().phi == s0.phi);
  CHECK(traj.snapshots.front().phit == s0.phit);

  const double e0 = discrete_energy(s0, false);
  const double e1 = discrete_energy(traj.snapshots.back(), false);
  CHECK(std::abs(e1 - e0) < 1e-12 * e0);

  InitialSpec zero;
  zero.kind = "zero";
  auto z = make_initial(zero, make_exponents(3), grid, shared_free(grid.nx()));
  auto ztraj = linear_propagate(z, 1.0, {1.0});
  for (double v : ztraj.snapshots.back().phi) CHECK(v == 0.0);
}

TEST_CASE("snapshots between steps interpolate linearly") {
  const auto grid = GridSpec::make(0.2, 4.0);  // dt = 0.1
  auto s0 = gaussian_state(3, grid);
  auto traj = evolve(s0, 1.0, {0.1, 0.15, 0.2}, true);
  REQUIRE(traj.snapshots.size() == 3);
  const auto& a = traj.snapshots[0];
  const auto& m = traj.snapshots[1];
  const auto& b = traj.snapshots[2];
  for (std::size_t q = 0; q < m.phi.size(); ++q)
    CHECK(m.phi[q] == doctest::Approx(0.5 * (a.phi[q] + b.phi[q])).epsilon(1e-12));
}

TEST_CASE("sizing and configuration guards") {
  const auto grid = GridSpec::make(0.2, 8.0);
  InitialSpec spec;
  spec.kind = "gaussian";
  spec.width = 1.0;
  spec.t_horizon = 5.0;  // 6 + 5 > 8
  CHECK_THROWS_AS(
      make_initial(spec, make_exponents(3), grid, shared_free(grid.nx())),
      SupportTooLarge);
  CHECK_THROWS_AS(GridSpec::make(0.1, 4.0, 0.9), CFLViolation);

  auto s0 = gaussian_state(3, GridSpec::make(0.2, 4.0));
  auto traj = evolve(s0, 1.0, {1.0}, true);
  CHECK_THROWS_AS(traj.at_time(0.5), MissingSnapshot);
  CHECK_THROWS_AS(evolve(s0, 1.0, {2.0}, true), ConfigInvalid);
}
