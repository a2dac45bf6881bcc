// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#include "exwave/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "exwave/detail/stencil.hpp"
#include "exwave/errors.hpp"
#include "exwave/spectral.hpp"

namespace exwave::functionals {

using detail::d1_axis;
using detail::d1_stencil;
using detail::d2_axis;
using detail::Grad;
using detail::gradient;

namespace {

template <class Fn>
void for_each_exterior(const WaveState& s, Fn&& fn) {
  const int nx = s.grid.nx();
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nx; ++i)
      if (s.mask->exterior(i, j)) fn(i, j, s.grid.coord(i), s.grid.coord(j));
}

} // namespace

double energy(const WaveState& s) {
  const int nx = s.grid.nx();
  const double h = s.grid.h;
  const double pp1 = s.exponents.p + 1.0;
  double acc = 0;
  for_each_exterior(s, [&](int i, int j, double, double) {
    const std::size_t q = static_cast<std::size_t>(j) * nx + i;
    const Grad g = gradient(s.phi, *s.mask, nx, h, i, j);
    acc += 0.5 * (s.phit[q] * s.phit[q] + g.dx * g.dx + g.dy * g.dy) +
           std::pow(std::abs(s.phi[q]), pp1) / pp1;
  });
  return acc * h * h;
}

double weighted_energy(const WaveState& s, int k, double gamma) {
  if (k != 0 && k != 1)
    throw UnsupportedK("weighted energy supports only k in {0, 1}");
  const int nx = s.grid.nx();
  const double h = s.grid.h;
  const double pp1 = s.exponents.p + 1.0;
  double acc = 0;
  for_each_exterior(s, [&](int i, int j, double x, double y) {
    const std::size_t q = static_cast<std::size_t>(j) * nx + i;
    const double w = 1.0 + std::hypot(x, y);
    const Grad g = gradient(s.phi, *s.mask, nx, h, i, j);
    double v = std::pow(w, gamma) *
               (g.dx * g.dx + g.dy * g.dy + s.phit[q] * s.phit[q] +
                std::pow(std::abs(s.phi[q]), pp1));
    if (k == 1) {
      const double fxx = d2_axis(s.phi, *s.mask, nx, h, i, j, 1, 0);
      const double fyy = d2_axis(s.phi, *s.mask, nx, h, i, j, 0, 1);
      // mixed derivative: one-sided-aware x derivative of the y derivative
      const double fxy =
          d1_stencil(*s.mask, nx, h, i, j, 1, 0, [&](int a, int b) {
            return d1_axis(s.phi, *s.mask, nx, h, a, b, 0, 1);
          });
      const Grad gtx = gradient(s.phit, *s.mask, nx, h, i, j);
      v += std::pow(w, gamma + 2.0) *
           (fxx * fxx + 2.0 * fxy * fxy + fyy * fyy + gtx.dx * gtx.dx +
            gtx.dy * gtx.dy);
    }
    acc += v;
  });
  return acc * h * h;
}

double conformal_energy(const WaveState& s) {
  const int nx = s.grid.nx();
  const double h = s.grid.h;
  const double t = s.t;
  const double pp1 = s.exponents.p + 1.0;
  double acc = 0;
  for_each_exterior(s, [&](int i, int j, double x, double y) {
    const std::size_t q = static_cast<std::size_t>(j) * nx + i;
    const double phi = s.phi[q], phit = s.phit[q];
    const Grad g = gradient(s.phi, *s.mask, nx, h, i, j);
    const double r2 = x * x + y * y;
    const double scaling = t * phit + x * g.dx + y * g.dy + phi;
    const double boost1 = t * g.dx + x * phit;
    const double boost2 = t * g.dy + y * phit;
    const double rot = x * g.dy - y * g.dx;
    acc += 0.5 * (scaling * scaling + boost1 * boost1 + boost2 * boost2 +
                  rot * rot + phit * phit + g.dx * g.dx + g.dy * g.dy) +
           (t * t + r2 + 1.0) * std::pow(std::abs(phi), pp1) / pp1;
  });
  return acc * h * h;
}

double weighted_potential(const WaveState& s, double weight_exponent) {
  const int nx = s.grid.nx();
  const double pp1 = s.exponents.p + 1.0;
  double acc = 0;
  for_each_exterior(s, [&](int i, int j, double x, double y) {
    const std::size_t q = static_cast<std::size_t>(j) * nx + i;
    if (s.phi[q] == 0) return;
    acc += std::pow(1.0 + std::abs(s.t) + std::hypot(x, y), weight_exponent) *
           std::pow(std::abs(s.phi[q]), pp1);
  });
  return acc * s.grid.h * s.grid.h;
}

double weighted_potential(const WaveState& s) {
  return weighted_potential(s, 0.5 * (s.exponents.p5 - 1.0));
}

KedReport ked_report(const WaveState& s, double R) {
  const int nx = s.grid.nx();
  const double h = s.grid.h;
  const double t = s.t;
  KedReport rep;
  double h2_acc = 0;
  for_each_exterior(s, [&](int i, int j, double x, double y) {
    const std::size_t q = static_cast<std::size_t>(j) * nx + i;
    const double phi = s.phi[q], phit = s.phit[q];
    const double r = std::hypot(x, y);
    const Grad g = gradient(s.phi, *s.mask, nx, h, i, j);
    if (r > R && r > 0) {
      const double slash = (x * g.dy - y * g.dx) / r;
      rep.angular += slash * slash;
    }
    const double cone = 1.0 + std::abs(t - r);
    rep.cone_weighted +=
        cone * cone * (phit * phit + g.dx * g.dx + g.dy * g.dy);
    rep.l2 += phi * phi;
    const double fxx = d2_axis(s.phi, *s.mask, nx, h, i, j, 1, 0);
    const double fyy = d2_axis(s.phi, *s.mask, nx, h, i, j, 0, 1);
    h2_acc += phi * phi + g.dx * g.dx + g.dy * g.dy + fxx * fxx + fyy * fyy;
  });
  const double cell = h * h;
  rep.angular *= (1.0 + t) * (1.0 + t) * cell;
  rep.cone_weighted *= cell;
  rep.l2 *= cell;
  rep.h2 = std::sqrt(h2_acc * cell);
  return rep;
}

RegionSup sup_by_region(const WaveState& s) {
  RegionSup sup;
  const int nx = s.grid.nx();
  const double t = s.t;
  for_each_exterior(s, [&](int i, int j, double x, double y) {
    const double v = std::abs(s.phi[static_cast<std::size_t>(j) * nx + i]);
    const double r = std::hypot(x, y);
    if (r <= 0.5 * t) sup.interior = std::max(sup.interior, v);
    if (r >= 0.5 * t && r <= 1.5 * t) sup.cone = std::max(sup.cone, v);
    if (r >= 1.5 * t) sup.exterior = std::max(sup.exterior, v);
  });
  return sup;
}

double xhs_norm(const Field& f, const GridSpec& grid, const Mask& mask,
                double R, double h_exp, double s) {
  if (!(h_exp >= 1.0) || !std::isfinite(h_exp))
    throw BadExponent("Lebesgue exponent must satisfy 1 <= h < infinity");
  if (!(s > 0) || !(s < 1)) throw BadExponent("order must satisfy 0 < s < 1");
  const double q_near = 2.0 / (1.0 - s);
  const int nx = grid.nx();
  double near = 0, far = 0;
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!mask.exterior(i, j)) continue;
      const double v = std::abs(f[static_cast<std::size_t>(j) * nx + i]);
      if (v == 0) continue;
      const double r = std::hypot(grid.coord(i), grid.coord(j));
      if (r < 3.0 * R) near += std::pow(v, q_near);
      if (r > 2.0 * R) far += std::pow(v, h_exp);
    }
  const double cell = grid.h * grid.h;
  return std::pow(near * cell, 1.0 / q_near) + std::pow(far * cell, 1.0 / h_exp);
}

bool suitable_pair(double q, double h_exp, double s) {
  if (!(q > 0) || !(h_exp > 0)) return false;
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
  if (near(q, 6) && near(h_exp, 6) && near(s, 0.5)) return true;
  const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  const double ih = std::isinf(h_exp) ? 0.0 : 1.0 / h_exp;
  return q > h_exp && near(iq + 2.0 * ih, 1.0 - s) && iq + 0.5 * ih < 0.25;
}

double scattering_residual(const Trajectory& traj, double T1, double T2,
                           const ResidualNorm& norm,
                           const spectral::DirichletOperator* op) {
  if (T2 < T1) throw MissingSnapshot("need T1 <= T2");
  const WaveState& a = traj.at_time(T1);
  const WaveState& b = traj.at_time(T2);
  const double span = T2 - T1;
  Trajectory lin = solver::linear_propagate(a, span, {span});
  const WaveState& c = lin.at_time(T2);

  const int nx = b.grid.nx();
  Field dphi(b.phi.size(), 0.0), dphit(b.phi.size(), 0.0);
  for (std::size_t qq = 0; qq < b.phi.size(); ++qq) {
    dphi[qq] = b.phi[qq] - c.phi[qq];
    dphit[qq] = b.phit[qq] - c.phit[qq];
  }

  if (norm.kind == ResidualNorm::Fractional) {
    if (!op)
      throw ConfigInvalid("fractional residual needs a Dirichlet operator");
    return spectral::pair_norm(*op, dphi, dphit, norm.s);
  }

  const double h = b.grid.h;
  double acc = 0;
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!b.mask->exterior(i, j)) continue;
      const std::size_t qq = static_cast<std::size_t>(j) * nx + i;
      const Grad g = gradient(dphi, *b.mask, nx, h, i, j);
      acc += g.dx * g.dx + g.dy * g.dy + dphit[qq] * dphit[qq];
    }
  return std::sqrt(acc * h * h);
}

DecayFit fit_decay(const EnergySeries& series, double t_min, double t_max) {
  std::vector<double> lt, lv;
  for (std::size_t k = 0; k < series.t.size(); ++k) {
    if (series.t[k] < t_min - 1e-12 || series.t[k] > t_max + 1e-12) continue;
    if (series.value[k] <= 0)
      throw NonPositiveValues("log fit needs positive values in the window");
    lt.push_back(std::log(series.t[k]));
    lv.push_back(std::log(series.value[k]));
  }
  if (lt.size() < 5)
    throw InsufficientData("decay fit needs at least 5 points in the window");

  const double n = static_cast<double>(lt.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < lt.size(); ++k) {
    mx += lt[k];
    my += lv[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < lt.size(); ++k) {
    sxx += (lt[k] - mx) * (lt[k] - mx);
    sxy += (lt[k] - mx) * (lv[k] - my);
    syy += (lv[k] - my) * (lv[k] - my);
  }
  DecayFit fit;
  fit.window = {t_min, t_max};
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_res = syy - sxy * sxy / sxx;
  // a series that is flat up to rounding has no variance to explain
  const double degenerate = 1e-20 * n * (1.0 + my * my);
  fit.r_squared = syy <= degenerate ? 1.0 : std::max(0.0, 1.0 - ss_res / syy);
  return fit;
}

} // namespace exwave::functionals
