// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace brownflow {

// Two-point motion of the coalescing flow driven by W+ and W-, sampled
// with a dyadic step that shrinks near the origin. A tentative step of
// size h is split through Brownian bridges whenever a particle may have
// crossed 0 inside it, so every accepted step is one the fixed-step
// Euler scheme at dt_min would have taken with the same outcome in law.
// Level crossings of watched levels are resolved with bridge hitting
// probabilities inside accepted steps.
struct PairMotionOptions {
  double dt_min = 1e-5;
  double horizon = 1e5;
  // largest step h satisfies kappa^2 h <= min(|x|, |y|)^2
  double kappa = 4.0;
  int max_level = 24;
  // > 0 enables counting of depth upcrossings from 0 to crossing_eps
  double crossing_eps = 0.0;
  // > 0 stops the run when y - x reaches this value
  double separation_barrier = 0.0;
  // also count a bridge touch of the diagonal inside a dt_min step
  bool bridge_coalescence = false;
  // <= 0 selects 2 sqrt(dt_min)
  double corner_tol = 0.0;
};

struct PairMotionResult {
  bool coalesced = false;
  bool barrier_hit = false;
  bool censored = false;
  // run time at the stopping event (or horizon)
  double stop_time = 0.0;
  // time spent in D = {x < 0 < y} and outside it, up to stop_time
  double time_in_d = 0.0;
  double time_outside_d = 0.0;
  // D-time at the first step with max(|x|, |y|) <= corner_tol; < 0 if none
  double time_in_d_at_corner = -1.0;
  std::uint64_t crossings = 0;
  std::uint64_t steps = 0;
  double x = 0.0;
  double y = 0.0;
};

// Signed depth of an ordered pair: positive when both points are on one
// side of 0 (distance of the nearer one), non-positive inside D.
double pair_depth(double x, double y);

// Requires x0 <= y0. Pairs with x0 == y0 coalesce at time 0.
PairMotionResult run_pair_motion(double x0, double y0, const PairMotionOptions& options,
                                 std::uint64_t seed);

}  // namespace brownflow
