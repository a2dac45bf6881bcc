// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "exwave/grid.hpp"

namespace exwave::detail {

// First derivative along one axis at an exterior node: centered where both
// neighbors are exterior, second-order one-sided into the domain next to the
// obstacle or the box edge, degrading gracefully in thin channels.
template <class Val>
inline double d1_stencil(const Mask& m, int nx, double h, int i, int j,
                         int di, int dj, Val&& val) {
  auto ext = [&](int a, int b) {
    return a >= 0 && a < nx && b >= 0 && b < nx && m.exterior(a, b);
  };
  const bool plus = ext(i + di, j + dj);
  const bool minus = ext(i - di, j - dj);
  if (plus && minus)
    return (val(i + di, j + dj) - val(i - di, j - dj)) / (2.0 * h);
  if (plus) {
    if (ext(i + 2 * di, j + 2 * dj))
      return (-3.0 * val(i, j) + 4.0 * val(i + di, j + dj) -
              val(i + 2 * di, j + 2 * dj)) / (2.0 * h);
    return (val(i + di, j + dj) - val(i, j)) / h;
  }
  if (minus) {
    if (ext(i - 2 * di, j - 2 * dj))
      return (3.0 * val(i, j) - 4.0 * val(i - di, j - dj) +
              val(i - 2 * di, j - 2 * dj)) / (2.0 * h);
    return (val(i, j) - val(i - di, j - dj)) / h;
  }
  return 0;
}

inline double d1_axis(const Field& f, const Mask& m, int nx, double h, int i,
                      int j, int di, int dj) {
  return d1_stencil(m, nx, h, i, j, di, dj, [&](int a, int b) {
    return f[static_cast<std::size_t>(b) * nx + a];
  });
}

// Second derivative along one axis; one-sided (first-order) at the boundary.
inline double d2_axis(const Field& f, const Mask& m, int nx, double h, int i,
                      int j, int di, int dj) {
  auto ext = [&](int a, int b) {
    return a >= 0 && a < nx && b >= 0 && b < nx && m.exterior(a, b);
  };
  auto val = [&](int a, int b) {
    return f[static_cast<std::size_t>(b) * nx + a];
  };
  const double h2 = h * h;
  const bool plus = ext(i + di, j + dj);
  const bool minus = ext(i - di, j - dj);
  if (plus && minus)
    return (val(i + di, j + dj) - 2.0 * val(i, j) + val(i - di, j - dj)) / h2;
  if (plus && ext(i + 2 * di, j + 2 * dj))
    return (val(i, j) - 2.0 * val(i + di, j + dj) +
            val(i + 2 * di, j + 2 * dj)) / h2;
  if (minus && ext(i - 2 * di, j - 2 * dj))
    return (val(i, j) - 2.0 * val(i - di, j - dj) +
            val(i - 2 * di, j - 2 * dj)) / h2;
  return 0;
}

struct Grad {
  double dx = 0, dy = 0;
};

inline Grad gradient(const Field& f, const Mask& m, int nx, double h, int i,
                     int j) {
  return {d1_axis(f, m, nx, h, i, j, 1, 0), d1_axis(f, m, nx, h, i, j, 0, 1)};
}

} // namespace exwave::detail
