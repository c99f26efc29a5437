// SPDX-License-Identifier: Apache-2.0
#include "brownflow/pair_motion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "brownflow/noise.hpp"

namespace brownflow {

double pair_depth(double x, double y) {
  if (x >= 0.0) return x;
  if (y <= 0.0) return -y;
  return std::max(x, -y);
}

namespace {

// P(a Brownian bridge of variance rate 1 from a to b over time h touches 0)
double zero_touch(double a, double b, double h) {
  if (a * b <= 0.0) return 1.0;
  return std::exp(-2.0 * a * b / h);
}

struct Pending {
  std::uint64_t units;
  double wp;
  double wm;
};

}  // namespace

PairMotionResult run_pair_motion(double x0, double y0, const PairMotionOptions& options,
                                 std::uint64_t seed) {
  if (!std::isfinite(x0) || !std::isfinite(y0) || x0 > y0) {
    throw std::invalid_argument("run_pair_motion: need finite x0 <= y0");
  }
  if (!(options.dt_min > 0.0) || !(options.horizon >= 0.0) || !(options.kappa > 0.0) ||
      options.max_level < 0 || options.max_level > 40) {
    throw std::invalid_argument("run_pair_motion: bad options");
  }
  const double dt = options.dt_min;
  const double tol = 1e-12 * std::max({1.0, std::abs(x0), std::abs(y0)});
  const double eps = options.crossing_eps;
  const double barrier = options.separation_barrier;
  const double corner_tol = options.corner_tol > 0.0 ? options.corner_tol : 2.0 * std::sqrt(dt);
  const auto horizon_units = static_cast<std::uint64_t>(std::llround(options.horizon / dt));

  PairMotionResult r;
  double x = to_lattice(x0);
  double y = to_lattice(y0);
  if (y - x <= tol) {
    r.coalesced = true;
    r.time_in_d_at_corner = 0.0;
    r.x = x;
    r.y = y;
    return r;
  }

  IncrementStream wplus(seed, StreamLabel::plus(), dt);
  IncrementStream wminus(seed, StreamLabel::minus(), dt);
  IncrementStream ctl(seed, StreamLabel::control(0), dt);

  std::uint64_t units = 0;
  bool armed = true;
  std::array<Pending, 2 * 48> stack{};

  auto finish = [&] {
    r.stop_time = static_cast<double>(units) * dt;
    r.censored = !r.coalesced && !r.barrier_hit;
    r.x = x;
    r.y = y;
    return r;
  };

  if (std::max(std::abs(x), std::abs(y)) <= corner_tol) r.time_in_d_at_corner = 0.0;

  while (units < horizon_units) {
    const double d = std::min(std::abs(x), std::abs(y));
    int level = 0;
    while (level < options.max_level) {
      const auto next = std::uint64_t{1} << (level + 1);
      if (static_cast<double>(next) * dt * options.kappa * options.kappa > d * d) break;
      if (units + next > horizon_units) break;
      ++level;
    }
    const std::uint64_t top = std::uint64_t{1} << level;
    const double h_top = static_cast<double>(top) * dt;
    std::size_t sp = 0;
    stack[sp++] = {top, wplus.gaussian(h_top), wminus.gaussian(h_top)};

    while (sp > 0) {
      const Pending cur = stack[--sp];
      const double h = static_cast<double>(cur.units) * dt;
      const double nx = x > 0.0 ? x + cur.wp : x + cur.wm;
      const double ny = y > 0.0 ? y + cur.wp : y + cur.wm;

      if (cur.units > 1) {
        const bool split =
            ctl.uniform() < zero_touch(x, nx, h) || ctl.uniform() < zero_touch(y, ny, h);
        if (split) {
          const std::uint64_t half = cur.units / 2;
          const double hh = static_cast<double>(half) * dt;
          const double p1 = to_lattice(0.5 * cur.wp) + ctl.gaussian(0.5 * hh);
          const double m1 = to_lattice(0.5 * cur.wm) + ctl.gaussian(0.5 * hh);
          stack[sp++] = {half, cur.wp - p1, cur.wm - m1};
          stack[sp++] = {half, p1, m1};
          continue;
        }
      }

      // accept the step
      const bool in_d = x <= 0.0 && y > 0.0;
      const double s_old = pair_depth(x, y);
      const double d_old = y - x;
      if (in_d) {
        r.time_in_d += h;
      } else {
        r.time_outside_d += h;
      }
      units += cur.units;
      ++r.steps;
      x = nx;
      y = ny;
      if (std::abs(x) >= kLatticeRange || std::abs(y) >= kLatticeRange) {
        throw std::range_error("run_pair_motion: particle left the exact-arithmetic range");
      }
      const double d_new = y - x;

      if (barrier > 0.0 && in_d) {
        bool hit = d_new >= barrier;
        if (!hit && d_new > 0.0) {
          // separation moves with variance rate 2 inside D
          hit = ctl.uniform() < std::exp(-(barrier - d_old) * (barrier - d_new) / h);
        }
        if (hit) {
          r.barrier_hit = true;
          return finish();
        }
      }
      if (d_new <= tol) {
        r.coalesced = true;
        return finish();
      }
      if (options.bridge_coalescence && in_d && x <= 0.0 && y > 0.0 &&
          ctl.uniform() < std::exp(-d_old * d_new / h)) {
        r.coalesced = true;
        return finish();
      }
      if (r.time_in_d_at_corner < 0.0 && std::max(std::abs(x), std::abs(y)) <= corner_tol) {
        r.time_in_d_at_corner = r.time_in_d;
      }
      if (eps > 0.0) {
        const double s = pair_depth(x, y);
        if (armed) {
          bool hit = s >= eps;
          if (!hit && s_old > 0.0 && s > 0.0) {
            hit = ctl.uniform() < std::exp(-2.0 * (eps - s_old) * (eps - s) / h);
          }
          if (hit) {
            ++r.crossings;
            armed = false;
          }
        } else if (s <= 0.0 || (s_old > 0.0 && ctl.uniform() < zero_touch(s_old, s, h))) {
          armed = true;
        }
      }
    }
  }
  return finish();
}

}  // namespace brownflow
