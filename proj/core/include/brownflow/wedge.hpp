// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "brownflow/noise.hpp"
#include "brownflow/pair_motion.hpp"
#include "brownflow/stats.hpp"

namespace brownflow {

enum class WedgeRegion {
  half_plane,  // {x < 0}
  d_wedge,     // D = {x <= 0 <= y} u {y <= 0 <= x}
  d_reflect,   // D^r = {x <= 0 or y <= 0}
  d_plus,      // D+ = {x > 0 and y > 0}
  custom
};

bool in_region(WedgeRegion region, double x, double y);

// A path seen only through the clock of a region. Sample j is the start
// of the j-th retained step; the end of the last retained step closes
// the path, so a path with n retained steps has n + 1 samples.
struct WedgePath {
  TimeGrid grid_r;
  std::vector<double> xr;
  std::vector<double> yr;
  std::vector<std::size_t> index_map;
  std::vector<double> l_est;
  WedgeRegion region = WedgeRegion::custom;

  std::size_t n_steps() const { return grid_r.n_steps; }
  double elapsed() const { return grid_r.duration(); }
};

WedgePath time_change(std::span<const double> x, std::span<const double> y,
                      std::span<const std::uint8_t> indicator, double dt,
                      WedgeRegion region = WedgeRegion::custom);
// Indicator evaluated at the left point of every step.
std::vector<std::uint8_t> region_indicator(std::span<const double> x,
                                           std::span<const double> y, WedgeRegion region);

std::pair<std::vector<double>, std::vector<double>> uv_transform(const WedgePath& wedge);

// How to count an excursion that happens between two samples.
enum class BridgeModel {
  none,       // grid values only
  free,       // free Brownian bridge of variance rate sigma^2
  reflected,  // modulus of a Brownian bridge
};

struct CrossingOptions {
  double boundary_tol = 1e-9;
  BridgeModel bridge = BridgeModel::none;
  // variance of one increment of the underlying motion; needed for bridges
  double step_variance = 0.0;
};

struct CrossingCount {
  double eps = 0.0;
  std::uint64_t count = 0;
  // expected number of completed upcrossings given the samples
  double expected_count = 0.0;
  double estimate = 0.0;
};

// With BridgeModel::none, count upcrossings of the sampled path from
// <= boundary_tol to >= eps. With a bridge model the estimate uses the
// conditional expectation of the count given the samples, which removes
// the bias from excursions that end between grid points.
CrossingCount local_time_crossings(std::span<const double> distance_path, double eps,
                                   const CrossingOptions& options = {});
// Running estimate, one entry per sample.
std::vector<double> running_local_time(std::span<const double> distance_path, double eps,
                                       const CrossingOptions& options = {});

// Distance to the boundary of the wedge's region: -x on the half plane,
// min(|x|, |y|) on D; other regions are rejected.
std::vector<double> boundary_distance(const WedgePath& wedge);
// Fills wedge.l_est with the running estimate on boundary_distance().
void attach_local_time(WedgePath& wedge, double eps, const CrossingOptions& options);

struct AxisLocalTimes {
  double x_axis = 0.0;  // boundary {x = 0}
  double y_axis = 0.0;  // boundary {y = 0}
};

// Separate estimates on |x| and |y|.
AxisLocalTimes per_axis_local_times(const WedgePath& wedge, double eps,
                                    const CrossingOptions& options);

// Per-replica quantities entering the Laplace identity.
struct LaplaceSample {
  bool censored = false;
  double t_minus_t0 = 0.0;
  double t0 = 0.0;
  double t0_corner = -1.0;
  double coalescence_time = 0.0;
  double crossing_estimate = 0.0;  // eps * N_eps
  std::uint64_t crossings = 0;
};

struct LaplaceOptions {
  double x0 = -0.1;
  double y0 = 0.1;
  double dt = 1e-5;
  double eps = 0.01;
  double horizon = 1e5;
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
};

struct LaplaceSamples {
  std::vector<LaplaceSample> samples;
  std::size_t censored = 0;
  double censored_fraction() const {
    return samples.empty() ? 0.0 : static_cast<double>(censored) / samples.size();
  }
};

LaplaceSamples laplace_identity_samples(const LaplaceOptions& options);

struct LaplaceComparison {
  double alpha = 0.0;
  MCSummary lhs;  // e^{-alpha (T - T0)}
  MCSummary rhs;  // e^{-2 sqrt(2 alpha) L}, L = eps N_eps / 2
  MCSummary diff;
  double combined_stderr = 0.0;
  bool pass = false;
};

LaplaceComparison compare_laplace(const LaplaceSamples& samples, double alpha);

struct ReflectionReport {
  double elapsed = 0.0;
  double qv_b1 = 0.0;
  double qv_b2 = 0.0;
  double cross = 0.0;
  double tolerance = 0.0;
  bool qv_b1_pass = false;
  bool qv_b2_pass = false;
  bool cross_pass = false;
  bool touched_boundary = false;
};

// b1 = xr + l_est - xr[0], b2 = yr + l_est - yr[0]; tolerance 5 sqrt(dt) t.
ReflectionReport reflection_decomposition_check(const WedgePath& wedge);

struct CornerReport {
  std::size_t n_steps = 0;
  std::size_t reflect_steps = 0;
  std::size_t plus_steps = 0;
  bool reassembly_exact = false;
  bool separation_constant = false;
  std::size_t r_increments = 0;
  double ks_statistic = 0.0;
  double ks_p_value = 1.0;
};

// Splits a 2-point path of the C+ flow along D^r and D+.
CornerReport corner_decomposition_check(std::span<const double> x, std::span<const double> y,
                                        double dt);

// h(u, v) = (u^2 + v^2) / (2 v) along (U, V) steps whose left point lies
// inside the wedge |u| < v - margin; residual = dh - grad h . dZ - lap h dt / 2.
MCSummary h_function_residual(std::span<const double> u, std::span<const double> v, double dt,
                              double margin);

}  // namespace brownflow
