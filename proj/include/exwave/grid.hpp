// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "exwave/errors.hpp"

namespace exwave {

// Uniform square grid on [-L, L]^2.  Node (i, j) sits at
// (coord(i), coord(j)) with coord(i) = (i - n_half) * h, so the origin is
// always a node.  The effective half-width n_half*h may differ from the
// requested L by up to h/2.
struct GridSpec {
  double h = 0.1;
  double L = 10.0;
  double dt = 0.05;
  double lambda = 0.5;  // dt / h

  int n_half() const { return static_cast<int>(std::llround(L / h)); }
  int nx() const { return 2 * n_half() + 1; }
  double coord(int i) const { return (i - n_half()) * h; }
  double half_width() const { return n_half() * h; }

  static GridSpec make(double h, double L, double lambda = 0.5) {
    GridSpec g;
    g.h = h;
    g.L = L;
    g.lambda = lambda;
    g.dt = lambda * h;
    g.validate();
    return g;
  }

  void validate() const {
    if (!(h > 0) || !(L > 0) || !(dt > 0))
      throw CFLViolation("grid spacing, extent and time step must be positive");
    if (lambda > 1.0 / std::sqrt(2.0) + 1e-12)
      throw CFLViolation("dt/h exceeds the 2D five-point stability bound 1/sqrt(2)");
  }
};

enum class NodeClass : std::uint8_t { EXTERIOR = 0, OBSTACLE = 1 };

struct BoundaryNode {
  int i = 0, j = 0;     // exterior node with at least one obstacle 4-neighbor
  double nx = 0, ny = 0;  // outward unit normal of the nearest boundary point
};

struct Mask {
  int nx = 0;
  std::vector<NodeClass> cls;         // nx * nx entries, row-major (j * nx + i)
  std::vector<BoundaryNode> boundary;
  long n_exterior = 0;

  bool exterior(int i, int j) const {
    return cls[static_cast<std::size_t>(j) * nx + i] == NodeClass::EXTERIOR;
  }
  NodeClass at(int i, int j) const {
    return cls[static_cast<std::size_t>(j) * nx + i];
  }
};

using Field = std::vector<double>;  // nx * nx values, row-major

// Obstacle-free mask: every node exterior.
inline Mask free_mask(int nx) {
  Mask m;
  m.nx = nx;
  m.cls.assign(static_cast<std::size_t>(nx) * nx, NodeClass::EXTERIOR);
  m.n_exterior = static_cast<long>(nx) * nx;
  return m;
}

} // namespace exwave
