// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#include "exwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "exwave/errors.hpp"

namespace exwave::solver {

Exponents make_exponents(double p) {
  if (!(p > 1)) throw BadP("nonlinearity exponent must satisfy p > 1");
  Exponents e;
  e.p = p;
  e.p5 = std::min(p, 5.0);
  e.sp = (p - 3.0) / (p - 1.0);
  e.thresh_energy = 2.0 * std::sqrt(5.0) - 1.0;
  e.thresh_critical = 1.0 + 2.0 * std::sqrt(2.0);
  return e;
}

const WaveState& Trajectory::at_time(double t, double tol) const {
  for (const auto& s : snapshots)
    if (std::abs(s.t - t) <= tol) return s;
  throw MissingSnapshot("no snapshot at t = " + std::to_string(t));
}

namespace {

// C-infinity ramp: 0 for u <= 0, 1 for u >= 1.
double smoothstep(double u) {
  if (u <= 0) return 0;
  if (u >= 1) return 1;
  double a = std::exp(-1.0 / u);
  double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// |phi|^{p-1} phi with a fast path for integer p.
struct Nonlinearity {
  double p;
  int ip;
  bool integer_p;
  explicit Nonlinearity(double p_)
      : p(p_),
        ip(static_cast<int>(std::lround(p_))),
        integer_p(std::abs(p_ - std::lround(p_)) < 1e-12) {}

  double operator()(double v) const {
    if (integer_p) {
      double a = std::abs(v), m = v;
      for (int k = 1; k < ip; ++k) m *= a;
      return m;
    }
    return std::pow(std::abs(v), p - 1.0) * v;
  }
};

} // namespace

double InitialSpec::support_radius() const {
  if (kind == "zero" || amplitude == 0) return 0;
  if (kind == "gaussian")
    return std::hypot(center[0], center[1]) + 6.0 * width;
  if (kind == "ring") return radius + 6.0 * width;
  if (kind == "random_smooth") return radius;
  throw ConfigInvalid("unknown initial data kind: " + kind);
}

WaveState make_initial(const InitialSpec& spec, const Exponents& exponents,
                       const GridSpec& grid, std::shared_ptr<const Mask> mask,
                       const geometry::ObstacleProfile* profile) {
  grid.validate();
  const double support = spec.support_radius();
  if (spec.t_horizon > 0 &&
      support + spec.t_horizon > grid.half_width() + 1e-9)
    throw SupportTooLarge(
        "data support plus evolution span exceeds the box half-width");

  WaveState s;
  s.t = 0;
  s.grid = grid;
  s.mask = std::move(mask);
  s.exponents = exponents;
  const int nx = grid.nx();
  s.phi.assign(static_cast<std::size_t>(nx) * nx, 0.0);
  s.phit.assign(static_cast<std::size_t>(nx) * nx, 0.0);
  if (spec.kind == "zero" || spec.amplitude == 0) return s;

  // random_smooth: fixed trigonometric coefficients, one rng for phi then phit
  std::vector<double> amp, phase1, phase2;
  if (spec.kind == "random_smooth") {
    std::mt19937_64 rng(spec.seed);
    const int nmodes = (spec.cutoff + 1) * (spec.cutoff + 1);
    amp.resize(2 * nmodes);
    phase1.resize(2 * nmodes);
    phase2.resize(2 * nmodes);
    for (int m = 0; m < 2 * nmodes; ++m) {
      amp[m] = 2.0 * uniform01(rng) - 1.0;
      phase1[m] = 2.0 * M_PI * uniform01(rng);
      phase2[m] = 2.0 * M_PI * uniform01(rng);
    }
  }

  auto value = [&](double x, double y, bool velocity) -> double {
    if (spec.kind == "gaussian") {
      const double dx = x - spec.center[0], dy = y - spec.center[1];
      const double r2 = dx * dx + dy * dy;
      const double cut = 6.0 * spec.width;
      if (r2 >= cut * cut) return 0;
      double g = std::exp(-r2 / (2.0 * spec.width * spec.width));
      return (velocity ? spec.phit_amplitude : spec.amplitude) * g;
    }
    if (spec.kind == "ring") {
      const double r = std::hypot(x, y);
      const double d = r - spec.radius;
      if (std::abs(d) >= 6.0 * spec.width) return 0;
      double g = std::exp(-d * d / (2.0 * spec.width * spec.width));
      return (velocity ? spec.phit_amplitude : spec.amplitude) * g;
    }
    // random_smooth: band-limited trig polynomial under a C-infinity bump
    const double r = std::hypot(x, y);
    if (r >= spec.radius) return 0;
    const double u = 1.0 - (r / spec.radius) * (r / spec.radius);
    const double bump = std::exp(1.0 - 1.0 / u);
    const int n = spec.cutoff;
    const double k0 = M_PI / spec.radius;
    double v = 0;
    int m = 0;
    const int off = velocity ? (n + 1) * (n + 1) : 0;
    for (int kx = 0; kx <= n; ++kx)
      for (int ky = 0; ky <= n; ++ky, ++m) {
        v += amp[off + m] * std::cos(kx * k0 * x + phase1[off + m]) *
             std::cos(ky * k0 * y + phase2[off + m]);
      }
    double scale = velocity ? spec.phit_amplitude : spec.amplitude;
    return scale * bump * v;
  };

  // taper of the radial distance to the obstacle boundary, C-infinity,
  // reaches 1 at distance taper_width
  const double taper_width = 0.5;
  auto taper = [&](double x, double y) -> double {
    if (!profile) return 1.0;
    const double r = std::hypot(x, y);
    if (r > profile->R_outer + taper_width) return 1.0;
    const double d = r - profile->rho(std::atan2(y, x));
    return smoothstep(d / taper_width);
  };

  const bool want_phit =
      spec.phit_amplitude != 0 || spec.kind == "random_smooth";
  for (int j = 0; j < nx; ++j) {
    const double y = grid.coord(j);
    for (int i = 0; i < nx; ++i) {
      if (!s.mask->exterior(i, j)) continue;
      const double x = grid.coord(i);
      const double w = taper(x, y);
      if (w == 0) continue;
      s.at(s.phi, i, j) = w * value(x, y, false);
      if (want_phit && spec.phit_amplitude != 0)
        s.at(s.phit, i, j) = w * value(x, y, true);
    }
  }
  return s;
}

namespace {

// acceleration F(phi) = Lap_h phi - N(phi), zero on OBSTACLE nodes and the
// outer edge
void acceleration(const WaveState& s, const Nonlinearity& nl,
                  bool nonlinearity_on, Field& out) {
  const int nx = s.grid.nx();
  const double inv_h2 = 1.0 / (s.grid.h * s.grid.h);
  out.assign(s.phi.size(), 0.0);
  const auto& cls = s.mask->cls;
  const double* phi = s.phi.data();
  double* acc = out.data();
  for (int j = 1; j + 1 < nx; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    for (int i = 1; i + 1 < nx; ++i) {
      const std::size_t q = row + i;
      if (cls[q] != NodeClass::EXTERIOR) continue;
      const double c = phi[q];
      double lap = (phi[q - 1] + phi[q + 1] + phi[q - nx] + phi[q + nx] -
                    4.0 * c) * inv_h2;
      acc[q] = nonlinearity_on ? lap - nl(c) : lap;
    }
  }
}

void check_finite(const WaveState& s) {
  double sum = 0;
  for (double v : s.phi) sum += v * v;
  for (double v : s.phit) sum += v * v;
  if (!std::isfinite(sum))
    throw NonFinite("field blew up; check CFL number and data amplitude");
}

} // namespace

WaveState step(const WaveState& state, bool nonlinearity_on) {
  state.grid.validate();
  WaveState next = state;
  const Nonlinearity nl(state.exponents.p);
  const double dt = state.grid.dt;
  Field a0, a1;
  acceleration(state, nl, nonlinearity_on, a0);
  for (std::size_t q = 0; q < next.phi.size(); ++q)
    next.phi[q] += dt * state.phit[q] + 0.5 * dt * dt * a0[q];
  next.t = state.t + dt;
  acceleration(next, nl, nonlinearity_on, a1);
  for (std::size_t q = 0; q < next.phit.size(); ++q)
    next.phit[q] += 0.5 * dt * (a0[q] + a1[q]);
  check_finite(next);
  return next;
}

namespace {

// In-place velocity-Verlet loop reusing the acceleration across steps.
// observer(state) runs after every step (and once on the initial state).
void evolve_loop(WaveState& s, long n_steps, bool nonlinearity_on,
                 const std::function<void(const WaveState&)>& observer) {
  const Nonlinearity nl(s.exponents.p);
  const double dt = s.grid.dt;
  Field acc, acc_next;
  acceleration(s, nl, nonlinearity_on, acc);
  if (observer) observer(s);
  for (long n = 0; n < n_steps; ++n) {
    for (std::size_t q = 0; q < s.phi.size(); ++q)
      s.phi[q] += dt * s.phit[q] + 0.5 * dt * dt * acc[q];
    s.t += dt;
    acceleration(s, nl, nonlinearity_on, acc_next);
    for (std::size_t q = 0; q < s.phit.size(); ++q)
      s.phit[q] += 0.5 * dt * (acc[q] + acc_next[q]);
    acc.swap(acc_next);
    if ((n & 63) == 0 || n + 1 == n_steps) check_finite(s);
    if (observer) observer(s);
  }
}

} // namespace

Trajectory evolve(const WaveState& initial, double T_final,
                  const std::vector<double>& snapshot_times,
                  bool nonlinearity_on) {
  const double dt = initial.grid.dt;
  const double span = T_final - initial.t;
  if (span < -1e-12) throw ConfigInvalid("T_final before initial time");
  const long n_steps = std::lround(span / dt);

  std::vector<double> wanted = snapshot_times;
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               wanted.end());
  for (double t : wanted)
    if (t < initial.t - 1e-9 || t > initial.t + n_steps * dt + 1e-9)
      throw ConfigInvalid("snapshot time outside the evolution span");

  Trajectory traj;
  traj.p = initial.exponents.p;
  traj.grid = initial.grid;
  traj.snapshots.reserve(wanted.size());

  std::size_t next_idx = 0;
  WaveState prev;  // previous step, for linear time interpolation
  bool have_prev = false;
  auto on_state = [&](const WaveState& s) {
    while (next_idx < wanted.size() && wanted[next_idx] <= s.t + 1e-9) {
      const double tw = wanted[next_idx];
      if (std::abs(tw - s.t) <= 1e-9 || !have_prev) {
        traj.snapshots.push_back(s);
        traj.snapshots.back().t = tw;
      } else {
        const double a = (tw - prev.t) / (s.t - prev.t);
        WaveState mid = prev;
        mid.t = tw;
        for (std::size_t q = 0; q < mid.phi.size(); ++q) {
          mid.phi[q] += a * (s.phi[q] - prev.phi[q]);
          mid.phit[q] += a * (s.phit[q] - prev.phit[q]);
        }
        traj.snapshots.push_back(std::move(mid));
      }
      ++next_idx;
    }
    prev = s;
    have_prev = true;
  };

  WaveState s = initial;
  evolve_loop(s, n_steps, nonlinearity_on, on_state);
  return traj;
}

void evolve_observe(const WaveState& initial, double T_final,
                    bool nonlinearity_on,
                    const std::function<void(const WaveState&)>& observer) {
  WaveState s = initial;
  const long n_steps = std::lround((T_final - initial.t) / initial.grid.dt);
  evolve_loop(s, n_steps, nonlinearity_on, observer);
}

Trajectory linear_propagate(const WaveState& state, double dt_span,
                            const std::vector<double>& snapshot_times) {
  std::vector<double> absolute;
  absolute.reserve(snapshot_times.size());
  for (double t : snapshot_times) absolute.push_back(state.t + t);
  return evolve(state, state.t + dt_span, absolute, false);
}

double discrete_energy(const WaveState& state, bool nonlinearity_on) {
  WaveState next = step(state, nonlinearity_on);
  const GridSpec& g = state.grid;
  const int nx = g.nx();
  const double dt = g.dt, h = g.h;
  const double pp1 = state.exponents.p + 1.0;
  double kinetic = 0, gradient = 0, potential = 0;
  for (int j = 0; j + 1 < nx; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    for (int i = 0; i + 1 < nx; ++i) {
      const std::size_t q = row + i;
      const double d = (next.phi[q] - state.phi[q]) / dt;
      kinetic += d * d;
      // forward differences pair the two levels
      gradient += (state.phi[q + 1] - state.phi[q]) * (next.phi[q + 1] - next.phi[q]) +
                  (state.phi[q + nx] - state.phi[q]) * (next.phi[q + nx] - next.phi[q]);
      if (nonlinearity_on)
        potential += 0.5 * (std::pow(std::abs(state.phi[q]), pp1) +
                            std::pow(std::abs(next.phi[q]), pp1));
    }
  }
  return (0.5 * kinetic + 0.5 * gradient / (h * h) + potential / pp1) * h * h;
}

double support_radius(const WaveState& state, double tol) {
  const int nx = state.grid.nx();
  double r = 0;
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t q = static_cast<std::size_t>(j) * nx + i;
      if (std::abs(state.phi[q]) > tol || std::abs(state.phit[q]) > tol)
        r = std::max(r, std::hypot(state.grid.coord(i), state.grid.coord(j)));
    }
  return r;
}

} // namespace exwave::solver
