// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#include "exwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace exwave::geometry {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double series_eval(const std::vector<double>& c, double t) {
  double v = c.empty() ? 0.0 : c[0];
  for (std::size_t m = 1; m < c.size(); ++m) v += c[m] * std::cos(m * t);
  return v;
}

double series_deriv(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (std::size_t m = 1; m < c.size(); ++m)
    v -= c[m] * static_cast<double>(m) * std::sin(m * t);
  return v;
}

// Cosine-series projection of a smooth even 2pi-periodic function by
// trapezoid quadrature on a dense uniform grid.
std::vector<double> project_cosine(const std::vector<double>& samples) {
  const std::size_t n = samples.size();  // samples at 2pi k / n
  std::vector<double> coeffs;
  double c0 = 0;
  for (double s : samples) c0 += s;
  c0 /= static_cast<double>(n);
  coeffs.push_back(c0);
  for (std::size_t m = 1; m + 1 < n / 2; ++m) {
    double cm = 0;
    for (std::size_t k = 0; k < n; ++k)
      cm += samples[k] * std::cos(m * kTwoPi * k / n);
    cm *= 2.0 / static_cast<double>(n);
    coeffs.push_back(cm);
    if (m > 8 && std::abs(cm) < 1e-14 * std::abs(c0) &&
        std::abs(coeffs[m - 1]) < 1e-14 * std::abs(c0))
      break;
  }
  while (coeffs.size() > 1 && std::abs(coeffs.back()) < 1e-15 * std::abs(c0))
    coeffs.pop_back();
  return coeffs;
}
} // namespace

double ObstacleProfile::rho(double t) const { return series_eval(coeffs, t); }
double ObstacleProfile::drho(double t) const { return series_deriv(coeffs, t); }

ObstacleProfile build_profile(const std::string& kind,
                              const std::vector<double>& coeffs,
                              int n_theta) {
  ObstacleProfile p;
  p.kind = kind;
  if (kind == "disk") {
    if (coeffs.size() != 1) throw NonPositiveRadius("disk expects a single radius");
    p.coeffs = {coeffs[0]};
  } else if (kind == "ellipse-graph") {
    if (coeffs.size() != 2) throw NonPositiveRadius("ellipse-graph expects semi-axes {a, b}");
    const double a = coeffs[0], b = coeffs[1];
    if (!(a > 0) || !(b > 0)) throw NonPositiveRadius("ellipse semi-axes must be positive");
    const int n = 4096;
    std::vector<double> samples(n);
    for (int k = 0; k < n; ++k) {
      double t = kTwoPi * k / n;
      samples[k] = a * b / std::hypot(b * std::cos(t), a * std::sin(t));
    }
    p.coeffs = project_cosine(samples);
  } else if (kind == "bumpy") {
    if (coeffs.empty()) throw NonPositiveRadius("bumpy expects cosine coefficients");
    p.coeffs = coeffs;
  } else {
    throw NonPositiveRadius("unknown profile kind: " + kind);
  }

  // positivity and star-shape sweep
  const int n_sweep = 100000;
  for (int k = 0; k < n_sweep; ++k) {
    double t = kTwoPi * k / n_sweep;
    double r = p.rho(t);
    if (!(r > 0)) throw NonPositiveRadius("rho(theta) <= 0 in profile sweep");
    double dr = p.drho(t);
    double margin = r * r / std::sqrt(r * r + dr * dr);
    if (!(margin > 0)) throw NonStarShaped("x . N <= 0 in profile sweep");
  }

  p.n_theta = n_theta;
  p.theta_samples.resize(n_theta + 1);
  p.rho_samples.resize(n_theta + 1);
  double r_max = 0;
  for (int k = 0; k <= n_theta; ++k) {
    double t = kTwoPi * k / n_theta;
    p.theta_samples[k] = t;
    p.rho_samples[k] = p.rho(t);
    r_max = std::max(r_max, p.rho_samples[k]);
  }
  p.rho_samples[n_theta] = p.rho_samples[0];  // closed table
  p.R_outer = r_max;
  return p;
}

std::array<double, 2> boundary_normal(const ObstacleProfile& profile, double theta) {
  const double r = profile.rho(theta);
  const double dr = profile.drho(theta);
  const double c = std::cos(theta), s = std::sin(theta);
  // outward normal of the curve theta -> rho(theta)(cos, sin)
  double nx = dr * s + r * c;
  double ny = -dr * c + r * s;
  double len = std::hypot(nx, ny);
  return {nx / len, ny / len};
}

Mask build_mask(const ObstacleProfile& profile, const GridSpec& grid) {
  if (grid.half_width() < profile.R_outer + grid.h)
    throw GridTooSmall("computational box does not cover the obstacle");
  Mask m;
  m.nx = grid.nx();
  const int nx = m.nx;
  m.cls.assign(static_cast<std::size_t>(nx) * nx, NodeClass::EXTERIOR);
  const double r_out = profile.R_outer;
  for (int j = 0; j < nx; ++j) {
    const double y = grid.coord(j);
    for (int i = 0; i < nx; ++i) {
      const double x = grid.coord(i);
      const double r = std::hypot(x, y);
      if (r > r_out) continue;  // cheap reject; classification stays position-only
      const double th = std::atan2(y, x);
      if (r <= profile.rho(th))
        m.cls[static_cast<std::size_t>(j) * nx + i] = NodeClass::OBSTACLE;
    }
  }
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!m.exterior(i, j)) continue;
      ++m.n_exterior;
      bool adj = (i > 0 && m.at(i - 1, j) == NodeClass::OBSTACLE) ||
                 (i + 1 < nx && m.at(i + 1, j) == NodeClass::OBSTACLE) ||
                 (j > 0 && m.at(i, j - 1) == NodeClass::OBSTACLE) ||
                 (j + 1 < nx && m.at(i, j + 1) == NodeClass::OBSTACLE);
      if (adj) {
        double th = std::atan2(grid.coord(j), grid.coord(i));
        auto n = boundary_normal(profile, th);
        m.boundary.push_back({i, j, n[0], n[1]});
      }
    }
  return m;
}

std::vector<QuadratureNode> boundary_quadrature(const ObstacleProfile& profile, int n) {
  std::vector<QuadratureNode> q;
  q.reserve(n);
  for (int k = 0; k < n; ++k) {
    double t = kTwoPi * k / n;
    double r = profile.rho(t);
    double dr = profile.drho(t);
    auto nrm = boundary_normal(profile, t);
    QuadratureNode node;
    node.point = {r * std::cos(t), r * std::sin(t)};
    node.normal = nrm;
    node.weight = std::sqrt(r * r + dr * dr) * (kTwoPi / n);
    q.push_back(node);
  }
  return q;
}

double min_star_margin(const ObstacleProfile& profile, int n_sweep) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_sweep; ++k) {
    double t = kTwoPi * k / n_sweep;
    double r = profile.rho(t);
    double dr = profile.drho(t);
    best = std::min(best, r * r / std::sqrt(r * r + dr * dr));
  }
  return best;
}

double curve_length(const ObstacleProfile& profile) {
  const int n = 1 << 14;
  double s = 0;
  for (int k = 0; k < n; ++k) {
    double t = kTwoPi * k / n;
    double r = profile.rho(t), dr = profile.drho(t);
    s += std::sqrt(r * r + dr * dr);
  }
  return s * kTwoPi / n;
}

double enclosed_area(const ObstacleProfile& profile) {
  const int n = 1 << 14;
  double s = 0;
  for (int k = 0; k < n; ++k) {
    double r = profile.rho(kTwoPi * k / n);
    s += 0.5 * r * r;
  }
  return s * kTwoPi / n;
}

} // namespace exwave::geometry
