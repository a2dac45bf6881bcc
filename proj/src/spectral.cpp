// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#include "exwave/spectral.hpp"

#include <lapacke.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "exwave/errors.hpp"

namespace exwave::spectral {

namespace {

double power_with_cutoff(double lambda, double half_s, double cutoff) {
  if (half_s == 0) return 1.0;
  if (lambda <= cutoff) return 0.0;
  return std::pow(lambda, half_s);
}

void ensure_eig(const DirichletOperator& op) {
  if (op.eig_ready) return;
  const long n = op.n();
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int k = 0; k < op.A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.A, k); it; ++it)
      a[static_cast<std::size_t>(it.col()) * n + it.row()] = it.value();
  op.eigval.assign(n, 0.0);
  const lapack_int info = LAPACKE_dsyevd(
      LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), a.data(),
      static_cast<lapack_int>(n), op.eigval.data());
  if (info != 0) throw ConvergenceFailure("dense eigendecomposition failed");
  op.eigvec = std::move(a);
  op.eig_ready = true;
}

std::vector<double> restrict_to_rows(const DirichletOperator& op,
                                     const Field& f) {
  std::vector<double> x(op.n());
  for (long r = 0; r < op.n(); ++r) {
    const auto [i, j] = op.nodes[r];
    x[r] = f[static_cast<std::size_t>(j) * op.grid.nx() + i];
  }
  return x;
}

Field embed_from_rows(const DirichletOperator& op,
                      const std::vector<double>& x) {
  const int nx = op.grid.nx();
  Field f(static_cast<std::size_t>(nx) * nx, 0.0);
  for (long r = 0; r < op.n(); ++r) {
    const auto [i, j] = op.nodes[r];
    f[static_cast<std::size_t>(j) * nx + i] = x[r];
  }
  return f;
}

std::vector<double> matvec(const DirichletOperator& op,
                           const std::vector<double>& x) {
  Eigen::Map<const Eigen::VectorXd> xm(x.data(), op.n());
  Eigen::VectorXd y = op.A * xm;
  return {y.data(), y.data() + y.size()};
}

// Lanczos evaluation of A^{half_s} applied to x, full reorthogonalization.
// Converged when the coefficient vector in the Krylov basis changes by less
// than 1e-8 relative between checks.
std::vector<double> lanczos_apply(const DirichletOperator& op,
                                  const std::vector<double>& x0,
                                  double half_s, double cutoff) {
  const long n = op.n();
  const double nrm0 = std::sqrt(
      std::inner_product(x0.begin(), x0.end(), x0.begin(), 0.0));
  if (nrm0 == 0) return std::vector<double>(n, 0.0);

  const int max_iter = static_cast<int>(std::min<long>(n, 700));
  std::vector<std::vector<double>> V;
  V.reserve(max_iter + 1);
  std::vector<double> alpha, beta;
  std::vector<double> v(x0);
  for (auto& c : v) c /= nrm0;
  V.push_back(v);

  std::vector<double> coeff_prev;
  std::vector<double> coeff;

  auto tridiag_coeffs = [&](int k) -> std::vector<double> {
    // f(T_k) e1 * nrm0 through the tridiagonal eigendecomposition
    std::vector<double> d(alpha.begin(), alpha.begin() + k);
    std::vector<double> e(k > 1 ? k - 1 : 0);
    for (int m = 0; m + 1 < k; ++m) e[m] = beta[m];
    std::vector<double> z(static_cast<std::size_t>(k) * k);
    const lapack_int info =
        LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', k, d.data(), e.data(), z.data(), k);
    if (info != 0) throw ConvergenceFailure("tridiagonal solve failed");
    std::vector<double> c(k, 0.0);
    for (int m = 0; m < k; ++m) {
      const double fm = power_with_cutoff(d[m], half_s, cutoff);
      const double w = z[static_cast<std::size_t>(m) * k] * fm * nrm0;
      for (int q = 0; q < k; ++q)
        c[q] += z[static_cast<std::size_t>(m) * k + q] * w;
    }
    return c;
  };

  for (int k = 0; k < max_iter; ++k) {
    std::vector<double> w = matvec(op, V[k]);
    double a = 0;
    for (long q = 0; q < n; ++q) a += w[q] * V[k][q];
    alpha.push_back(a);
    for (long q = 0; q < n; ++q) w[q] -= a * V[k][q];
    if (k > 0)
      for (long q = 0; q < n; ++q) w[q] -= beta[k - 1] * V[k - 1][q];
    for (const auto& u : V) {  // full reorthogonalization
      double d = 0;
      for (long q = 0; q < n; ++q) d += w[q] * u[q];
      for (long q = 0; q < n; ++q) w[q] -= d * u[q];
    }
    double b = std::sqrt(
        std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
    const int kk = k + 1;
    bool invariant = b < 1e-14 * std::abs(alpha[0]) + 1e-300;
    const bool check = invariant || kk == max_iter || (kk % 10 == 0);
    if (check) {
      coeff = tridiag_coeffs(kk);
      if (!coeff_prev.empty() || invariant) {
        double diff = 0, norm = 0;
        for (int q = 0; q < kk; ++q) {
          const double prev = q < static_cast<int>(coeff_prev.size())
                                  ? coeff_prev[q]
                                  : 0.0;
          diff += (coeff[q] - prev) * (coeff[q] - prev);
          norm += coeff[q] * coeff[q];
        }
        if (invariant || diff <= 1e-16 * norm) {
          std::vector<double> y(n, 0.0);
          for (int q = 0; q < kk; ++q)
            for (long m = 0; m < n; ++m) y[m] += coeff[q] * V[q][m];
          return y;
        }
      }
      coeff_prev = coeff;
    }
    if (invariant) break;
    beta.push_back(b);
    for (auto& c : w) c /= b;
    V.push_back(std::move(w));
  }
  throw ConvergenceFailure("iterative matrix function did not converge");
}

} // namespace

DirichletOperator assemble(const GridSpec& grid, const Mask& mask) {
  DirichletOperator op;
  op.grid = grid;
  const int nx = grid.nx();
  op.index.assign(static_cast<std::size_t>(nx) * nx, -1);
  for (int j = 1; j + 1 < nx; ++j)
    for (int i = 1; i + 1 < nx; ++i)
      if (mask.exterior(i, j)) {
        op.index[static_cast<std::size_t>(j) * nx + i] = op.n();
        op.nodes.push_back({i, j});
      }
  if (op.nodes.empty())
    throw EmptyExterior("no interior exterior nodes on this grid");

  const double inv_h2 = 1.0 / (grid.h * grid.h);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(op.nodes.size() * 5);
  for (long r = 0; r < op.n(); ++r) {
    const auto [i, j] = op.nodes[r];
    trip.emplace_back(r, r, 4.0 * inv_h2);
    const int off[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& o : off) {
      const long c = op.index[static_cast<std::size_t>(j + o[1]) * nx + i + o[0]];
      if (c >= 0) trip.emplace_back(r, c, -inv_h2);
    }
  }
  op.A.resize(op.n(), op.n());
  op.A.setFromTriplets(trip.begin(), trip.end());
  return op;
}

Field frac_apply(const DirichletOperator& op, const Field& f, double s) {
  std::vector<double> x = restrict_to_rows(op, f);
  if (s == 0) return embed_from_rows(op, x);
  if (s == 2) return embed_from_rows(op, matvec(op, x));

  const double half_s = 0.5 * s;
  if (op.n() <= op.dense_limit) {
    ensure_eig(op);
    const long n = op.n();
    const double cutoff = 1e-12 * op.eigval.back();
    std::vector<double> c(n, 0.0);
    for (long m = 0; m < n; ++m) {
      double d = 0;
      const double* col = op.eigvec.data() + static_cast<std::size_t>(m) * n;
      for (long q = 0; q < n; ++q) d += col[q] * x[q];
      c[m] = d * power_with_cutoff(op.eigval[m], half_s, cutoff);
    }
    std::vector<double> y(n, 0.0);
    for (long m = 0; m < n; ++m) {
      const double* col = op.eigvec.data() + static_cast<std::size_t>(m) * n;
      const double cm = c[m];
      if (cm == 0) continue;
      for (long q = 0; q < n; ++q) y[q] += cm * col[q];
    }
    return embed_from_rows(op, y);
  }

  const auto range = eig_range_estimate(op);
  const double cutoff = 1e-12 * range[1];
  return embed_from_rows(op, lanczos_apply(op, x, half_s, cutoff));
}

double frac_norm(const DirichletOperator& op, const Field& f, double s) {
  const Field g = frac_apply(op, f, s);
  double acc = 0;
  for (double v : g) acc += v * v;
  return op.grid.h * std::sqrt(acc);
}

double pair_norm(const DirichletOperator& op, const Field& f, const Field& g,
                 double s) {
  return frac_norm(op, f, s) + frac_norm(op, g, s - 1.0);
}

std::array<double, 2> eig_range_estimate(const DirichletOperator& op,
                                         int iters) {
  const long n = op.n();
  iters = static_cast<int>(std::min<long>(iters, n));
  std::mt19937_64 rng(12345);
  std::vector<double> v(n);
  for (auto& c : v)
    c = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  double nrm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  for (auto& c : v) c /= nrm;

  std::vector<std::vector<double>> V{v};
  std::vector<double> alpha, beta;
  for (int k = 0; k < iters; ++k) {
    std::vector<double> w = matvec(op, V[k]);
    double a = 0;
    for (long q = 0; q < n; ++q) a += w[q] * V[k][q];
    alpha.push_back(a);
    for (long q = 0; q < n; ++q) w[q] -= a * V[k][q];
    if (k > 0)
      for (long q = 0; q < n; ++q) w[q] -= beta[k - 1] * V[k - 1][q];
    for (const auto& u : V) {
      double d = 0;
      for (long q = 0; q < n; ++q) d += w[q] * u[q];
      for (long q = 0; q < n; ++q) w[q] -= d * u[q];
    }
    double b = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
    if (b < 1e-14 * std::abs(alpha[0]) + 1e-300) break;
    beta.push_back(b);
    for (auto& c : w) c /= b;
    V.push_back(std::move(w));
  }
  const int k = static_cast<int>(alpha.size());
  std::vector<double> d(alpha), e(beta.begin(), beta.begin() + (k - 1));
  const lapack_int info =
      LAPACKE_dstev(LAPACK_COL_MAJOR, 'N', k, d.data(), e.data(), nullptr, k);
  if (info != 0) throw ConvergenceFailure("tridiagonal solve failed");
  return {d.front(), d.back()};
}

} // namespace exwave::spectral
