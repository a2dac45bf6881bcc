// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "exwave/geometry.hpp"
#include "exwave/grid.hpp"

namespace exwave::solver {

struct Exponents {
  double p = 3;
  double p5 = 3;              // min{p, 5}
  double sp = 0;              // (p-3)/(p-1)
  double thresh_energy = 0;   // 2*sqrt(5)-1
  double thresh_critical = 0; // 1+2*sqrt(2)

  bool above_energy_threshold() const { return p > thresh_energy; }
  bool above_critical_threshold() const { return p > thresh_critical; }
};

Exponents make_exponents(double p);

// One time slice of the flow on the masked grid.  phi and phit are row-major
// nx*nx fields, zero on OBSTACLE nodes and on the outer box edge.
struct WaveState {
  double t = 0;
  Field phi;
  Field phit;
  Exponents exponents;
  GridSpec grid;
  std::shared_ptr<const Mask> mask;

  double& at(Field& f, int i, int j) const {
    return f[static_cast<std::size_t>(j) * grid.nx() + i];
  }
  double phi_at(int i, int j) const {
    return phi[static_cast<std::size_t>(j) * grid.nx() + i];
  }
  double phit_at(int i, int j) const {
    return phit[static_cast<std::size_t>(j) * grid.nx() + i];
  }
};

struct Trajectory {
  std::vector<WaveState> snapshots;  // strictly increasing times
  double p = 3;
  GridSpec grid;
  std::string profile_kind;
  std::uint64_t seed = 0;

  const WaveState& at_time(double t, double tol = 1e-9) const;
};

// kind = "zero" | "gaussian" | "ring" | "random_smooth"
struct InitialSpec {
  std::string kind = "gaussian";
  std::array<double, 2> center{0, 0};  // gaussian
  double width = 1.0;                  // gaussian / ring profile width
  double amplitude = 1.0;
  double radius = 3.0;          // ring radius; random_smooth support radius
  std::uint64_t seed = 1;       // random_smooth
  int cutoff = 4;               // random_smooth max wavenumber
  double phit_amplitude = 0.0;  // scale of the velocity component
  double t_horizon = 0.0;       // intended evolution span, 0 = skip sizing check

  double support_radius() const;
};

// Dirichlet-compatible data at t = 0: zero on OBSTACLE nodes, multiplied by a
// smooth taper of the radial distance to the obstacle boundary when a profile
// is given.  Hard truncation at the nominal support radius keeps finite
// propagation exact.
WaveState make_initial(const InitialSpec& spec, const Exponents& exponents,
                       const GridSpec& grid, std::shared_ptr<const Mask> mask,
                       const geometry::ObstacleProfile* profile = nullptr);

// One explicit time step dt.  Velocity-Verlet form of the leapfrog update:
// positions follow phi^{n+1} = 2 phi^n - phi^{n-1} + dt^2 (Lap_h phi - N(phi)),
// phit is the exactly centered difference (phi^{n+1}-phi^{n-1})/(2 dt).
WaveState step(const WaveState& state, bool nonlinearity_on);

Trajectory evolve(const WaveState& initial, double T_final,
                  const std::vector<double>& snapshot_times,
                  bool nonlinearity_on);

// Same flow, but hands every integer step to the observer instead of storing
// snapshots.  Used for dense functional time series.
void evolve_observe(const WaveState& initial, double T_final,
                    bool nonlinearity_on,
                    const std::function<void(const WaveState&)>& observer);

// The linear Dirichlet propagator L(t) acting on the Cauchy pair held by
// `state`; snapshot_times are offsets from state.t.
Trajectory linear_propagate(const WaveState& state, double dt_span,
                            const std::vector<double>& snapshot_times);

// Leapfrog-compatible discrete energy at the half step:
//   1/2 |(phi^{n+1}-phi^n)/dt|^2 + 1/2 <grad phi^n, grad phi^{n+1}>
//   + average of the potential terms.
// Exactly conserved for the linear scheme; O(dt^2) drift with the
// nonlinearity.  Uses one virtual step.
double discrete_energy(const WaveState& state, bool nonlinearity_on);

// Largest |x|_inf with |phi| or |phit| above `tol` (0 for zero states).
double support_radius(const WaveState& state, double tol = 0.0);

} // namespace exwave::solver
