// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "exwave/geometry.hpp"
#include "exwave/solver.hpp"

namespace exwave::multiplier {

using solver::Trajectory;

using Vec3 = std::array<double, 3>;                 // (t, x1, x2) components
using Tensor3 = std::array<std::array<double, 3>, 3>;

enum class FieldId { X0, X1tilde, X2tilde, mixed, spherical };

struct MultiplierEval {
  FieldId field_id = FieldId::X0;
  double Xt = 0;  // time component
  double Xr = 0;  // radial component (X0, spherical)
  double Xtheta = 0;  // angular component as measured by quadrature (spherical)
  Vec3 X{0, 0, 0};  // Cartesian components (X1tilde, X2tilde, mixed)
  double chi = 0;
  // Scalar prefactor of the on-solution divergence:
  //   X0:      coefficient of |phi|^{p+1}, ((p-5)/(p+1)) t
  //   X1tilde: coefficient of |phi|^{p+1}, ((5-p)/(p+1)) (x1-t)
  //   X2tilde: coefficient of |x2(phi_t+phi_1) + w phi_2|^2,
  //            ((5-p)/2) w^{(p-7)/2} with w = t-x1+1
  double div_closed_form = 0;
};

struct CurrentSample {
  Vec3 J{0, 0, 0};
  Tensor3 T{};
};

// T_mn = d_m phi d_n phi - 1/2 m_mn (d^s phi d_s phi + 2|phi|^{p+1}/(p+1)),
// metric m = diag(-1, 1, 1).  dphi = (phi_t, phi_x1, phi_x2).
Tensor3 energy_momentum(const Vec3& dphi, double phi, double p);

// J_m = T_mn X^n - 1/2 d_m chi |phi|^2 + 1/2 chi d_m |phi|^2.
Vec3 current(const Tensor3& T, const Vec3& X, double chi, const Vec3& dchi,
             double phi, const Vec3& dphi);

MultiplierEval eval_X0(double t, double r, double p);
MultiplierEval eval_X1(double t, double x1, double x2, double p);
MultiplierEval eval_X2(double t, double x1, double x2, double p);
// 1_{t<=x1} * 4 X1tilde + 1_{t>x1} * X2tilde (ties take the X1tilde branch).
MultiplierEval eval_mixed(double t, double x1, double x2, double p);

// Full current of the named planar field (X0 uses the polar-to-Cartesian
// radial extension) at a jet.  dphi = (phi_t, phi_x1, phi_x2).
Vec3 current_for_field(FieldId id, double t, double x1, double x2, double p,
                       double phi, const Vec3& dphi);

// Value of the closed-form divergence at the jet, assuming phi solves the
// equation at that point.
double divergence_closed_form(FieldId id, double t, double x1, double x2,
                              double p, double phi, const Vec3& dphi);

// Spherical average X(t, r) = int_0^{2pi} Xmixed(t+R, r, theta+theta') dtheta'.
// The angular component integrates to zero; only (Xt, Xr) survive.
MultiplierEval spherical_X(double t, double r, double p, double R,
                           int n_quad = 256);

// chi data of the spherical field, including the root-motion terms of
// d chi / dt that appear where the branch interface crosses the circle.
// cell_h > 0 replaces the 1/sqrt(r^2-tau^2) factor near r = tau by its radial
// cell average, which keeps node sums of the integrable singularity stable.
struct SphericalJet {
  double Xt = 0;
  double Xr = 0;
  double chi = 0;
  double dchi_dt = 0;
};
SphericalJet spherical_jet(double t, double r, double p, double R,
                           int n_quad = 256, double cell_h = 0);

struct FluxValue {
  double value = 0;
  bool sign_ok = false;
};

// Radial component of the spherical field in the folded form (three integrals
// over [0, pi/2]); valid on t + R >= r, which holds on R x dK.
FluxValue boundary_flux_Xr(double t, double r, double p, double R,
                           int n_quad = 512);

struct DivergenceRegion {
  double obstacle_clearance = 0;  // skip nodes within this distance of OBSTACLE nodes
  double r_max = 1e300;           // skip nodes with |x| > r_max
  double w_min = 1.0;             // X2tilde only: require t - x1 + 1 >= w_min
};

struct DivergenceReport {
  double max_abs = 0;     // max |fd - closed| over sampled nodes
  double l1_fd = 0;       // sum |fd| h^2          (per-time average)
  double l1_closed = 0;   // sum |closed| h^2      (per-time average)
  double l1_residual = 0; // sum |fd - closed| h^2 (per-time average)
  double l1_rel = 0;      // l1_residual / l1_closed (0 if closed form is 0)
  long n_nodes = 0;
};

// Compares the finite-difference divergence -d_t J0 + d_1 J1 + d_2 J2 of a
// simulated trajectory against the closed form, at the given snapshot times.
// Each time needs neighbor snapshots at +-dt_snap for the centered t
// derivative.  Supports X0, X1tilde, X2tilde.
DivergenceReport divergence_check(const Trajectory& traj, FieldId id,
                                  const DivergenceRegion& region,
                                  const std::vector<double>& times);

struct IdentityReport {
  double energy_T = 0;     // int_{t=T} J_0
  double bulk = 0;         // int_0^T int d^mu J_mu
  double energy_0 = 0;     // int_{t=0} J_0
  double boundary = 0;     // int_{[0,T] x dK} J_N
  double residual_rel = 0; // |(energy_T + bulk) - (energy_0 - boundary)| / |energy_0|
};

// Checks int_{t=T} J0 + int int d^mu J_mu = int_{t=0} J0 - int J_N using the
// trajectory snapshots (assumed uniformly spaced over [0, T]).  The bulk term
// is evaluated from the closed forms, not from finite differences of J, so
// the two sides are independent.  Supports X0 and spherical.
IdentityReport energy_identity_check(const Trajectory& traj, FieldId id,
                                     double T,
                                     const geometry::ObstacleProfile& profile,
                                     double R, int n_quad = 256);

// Constant field X = d_t, chi = 0: the identity reduces to energy
// conservation (zero bulk, boundary flux 1/2 N^i N_i |Nphi|^2... = 0 since
// X^i = 0).  Used as a calibration case.
IdentityReport energy_identity_check_dt(const Trajectory& traj, double T,
                                        const geometry::ObstacleProfile& profile);

} // namespace exwave::multiplier
