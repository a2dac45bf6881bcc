// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "exwave/solver.hpp"

namespace exwave::spectral {
struct DirichletOperator;
}

namespace exwave::functionals {

using solver::Trajectory;
using solver::WaveState;

struct EnergySeries {
  std::string name;
  std::vector<double> t;
  std::vector<double> value;

  void push(double time, double v) {
    t.push_back(time);
    value.push_back(v);
  }
};

struct DecayFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  std::array<double, 2> window{0, 0};
};

struct KedReport {
  double angular = 0;      // (1+t)^2 |slash-d phi|^2_{L2(r>R)}
  double cone_weighted = 0;  // |(1+|t-r|) dphi|^2_{L2}
  double l2 = 0;           // |phi|^2_{L2}
  double h2 = 0;           // |phi|_{H2}
};

struct RegionSup {
  double interior = 0;  // r <= t/2
  double cone = 0;      // t/2 <= r <= 3t/2
  double exterior = 0;  // r >= 3t/2
};

// Conserved energy: sum over EXTERIOR nodes of
//   1/2 (phit^2 + |grad_h phi|^2) + |phi|^{p+1}/(p+1), times h^2.
// One-sided second-order differences at boundary-adjacent nodes.
double energy(const WaveState& state);

// E_{k,gamma} = sum_{l<=k} int (1+|x|)^{gamma+2l} (|d^{l+1}phi|^2 + |d^l phit|^2)
//             + int (1+|x|)^gamma |phi|^{p+1}.
// Only k in {0,1} is supported.
double weighted_energy(const WaveState& state, int k, double gamma);

// 1/2 (|t phit + r dphi/dr + phi|^2 + |t d1 phi + x1 phit|^2
//      + |t d2 phi + x2 phit|^2 + |x1 d2 phi - x2 d1 phi|^2
//      + phit^2 + |grad phi|^2) + (t^2+r^2+1)/(p+1) |phi|^{p+1}.
double conformal_energy(const WaveState& state);

// int (1 + |t| + |x|)^{(p5-1)/2} |phi|^{p+1} dx at the snapshot time.
double weighted_potential(const WaveState& state);
// Same with an explicit weight exponent (used by consistency checks).
double weighted_potential(const WaveState& state, double weight_exponent);

KedReport ked_report(const WaveState& state, double R);

RegionSup sup_by_region(const WaveState& state);

// X^{h,s} norm of a single field component:
//   ||f||_{L^{2/(1-s)}(r<3R)} + ||f||_{L^h(r>2R)}   (overlapping regions).
double xhs_norm(const Field& f, const GridSpec& grid, const Mask& mask,
                double R, double h_exp, double s);

// True iff (q,h,s) = (6,6,1/2) or q > h, 1/q + 2/h = 1 - s, 1/q + 1/(2h) < 1/4.
// q may be infinite.
bool suitable_pair(double q, double h_exp, double s);

struct ResidualNorm {
  enum Kind { Energy, Fractional } kind = Energy;
  double s = 0.5;  // fractional order for Kind::Fractional

  static ResidualNorm energy() { return {Energy, 0}; }
  static ResidualNorm fractional(double s) { return {Fractional, s}; }
};

// || Phi(T2) - L(T2-T1) Phi(T1) || with L the linear Dirichlet propagator.
// Energy mode: H^1 x L^2 norm sqrt(int |grad d_phi|^2 + d_phit^2).
// Fractional mode: frac_norm(d_phi, s) + frac_norm(d_phit, s-1); requires op.
double scattering_residual(const Trajectory& traj, double T1, double T2,
                           const ResidualNorm& norm,
                           const spectral::DirichletOperator* op = nullptr);

// Least squares on (log t, log value) over t in [window[0], window[1]].
DecayFit fit_decay(const EnergySeries& series, double t_min, double t_max);

} // namespace exwave::functionals
