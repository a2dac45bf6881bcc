// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/SparseCore>
#include <array>
#include <vector>

#include "exwave/grid.hpp"

namespace exwave::spectral {

// Five-point discrete Dirichlet Laplacian (-Delta_h, positive) over the
// EXTERIOR nodes that are not on the outer box edge.  Symmetric positive
// definite; fractional powers through the spectral decomposition.
struct DirichletOperator {
  GridSpec grid;
  std::vector<long> index;                // grid node -> operator row, -1 if eliminated
  std::vector<std::array<int, 2>> nodes;  // operator row -> (i, j)
  Eigen::SparseMatrix<double> A;
  long dense_limit = 20000;  // full eigendecomposition up to this node count

  long n() const { return static_cast<long>(nodes.size()); }

  // Lazy dense spectral data (eigval ascending, eigvec column-major n x n).
  mutable bool eig_ready = false;
  mutable std::vector<double> eigval;
  mutable std::vector<double> eigvec;
};

DirichletOperator assemble(const GridSpec& grid, const Mask& mask);

// A^{s/2} f.  s = 0 is the identity, s = 2 the exact sparse product; other
// orders (including negative, used for H^{s-1}) go through the
// eigendecomposition when n <= dense_limit, else a Lanczos matrix-function
// evaluation with relative tolerance 1e-8.  Negative powers act on the part
// of the spectrum above 1e-12 * lambda_max.
Field frac_apply(const DirichletOperator& op, const Field& f, double s);

// || A^{s/2} f ||_{L^2,h} = h * |A^{s/2} f|_2.
double frac_norm(const DirichletOperator& op, const Field& f, double s);

// Cauchy-pair norm in H^s x H^{s-1}: frac_norm(f, s) + frac_norm(g, s-1).
double pair_norm(const DirichletOperator& op, const Field& f, const Field& g,
                 double s);

// (lambda_min, lambda_max) estimate by Lanczos probes; assemble uses it to
// certify positivity.
std::array<double, 2> eig_range_estimate(const DirichletOperator& op,
                                         int iters = 60);

} // namespace exwave::spectral
