// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "brownflow/noise.hpp"

namespace brownflow {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

// Trajectories of coupled particles with their coalescence classes.
// Positions are particle-major: particle p occupies
// positions[p * (n_steps + 1) .. (p + 1) * (n_steps + 1)).
struct NPointPath {
  TimeGrid grid;
  std::size_t n_particles = 0;
  std::vector<double> positions;
  // Class id of each particle per step, same layout as positions.
  // The id is the lowest particle index in the class.
  std::vector<std::uint32_t> classes;
  // Upper triangle, see pair_index(). kNever when the pair never merged.
  std::vector<double> coalescence_times;
  double merge_tol = 0.0;

  std::size_t n_samples() const { return grid.n_steps + 1; }
  double position(std::size_t particle, std::size_t step) const {
    return positions[particle * n_samples() + step];
  }
  std::span<const double> trajectory(std::size_t particle) const {
    return std::span<const double>(positions).subspan(particle * n_samples(), n_samples());
  }
  std::uint32_t class_of(std::size_t particle, std::size_t step) const {
    return classes[particle * n_samples() + step];
  }
  std::size_t pair_index(std::size_t i, std::size_t j) const;
  double coalescence_time(std::size_t i, std::size_t j) const;
  std::vector<double> terminal() const;
};

struct FlowMapSample {
  std::vector<double> x_grid;
  std::vector<double> images;
  std::uint64_t noise_ref = 0;
};

struct NoiseRecovery {
  double w_plus = 0.0;
  double w_minus = 0.0;
};

struct FlowPropertyReport {
  double s = 0.0, u = 0.0, t = 0.0;
  std::size_t n_points = 0;
  double max_abs_deviation = 0.0;
  double merge_tol = 0.0;
  bool within_tol = true;
};

struct ZeroEpoch {
  std::size_t step = 0;
  // number of particles at or below 0 after the epoch
  std::size_t below = 0;
};

// 1e-12 times max(1, max |x|).
double merge_tolerance(std::span<const double> x0);

double step_pm(double x, double dw_plus, double dw_minus);

std::vector<double> simulate_one_point_pm(double x0, const NoiseBundle& bundle);
// Same recursion on bare increment arrays; no path storage.
double terminal_one_point_pm(double x0, std::span<const double> dw_plus,
                             std::span<const double> dw_minus);

// Steps [first_step, last_step) of the bundle; the path grid starts at
// bundle time first_step. Initial positions are rounded to the lattice.
struct NPointOptions {
  std::size_t first_step = 0;
  std::size_t last_step = static_cast<std::size_t>(-1);
  bool record_pairs = true;
};

NPointPath simulate_n_point_pm(std::span<const double> x0, const NoiseBundle& bundle,
                               const NPointOptions& options = {});

FlowMapSample flow_map_pm(std::span<const double> x_grid, const NoiseBundle& bundle);
FlowMapSample flow_map_pm(std::span<const double> x_grid, const NoiseBundle& bundle,
                          std::size_t first_step, std::size_t last_step);

NoiseRecovery recover_noise_pm(const FlowMapSample& sample);

FlowPropertyReport flow_property_check(const NoiseBundle& bundle, double s, double u, double t,
                                       std::span<const double> x_grid);

// Steps at which the count of particles at or below 0 changes.
std::vector<ZeroEpoch> zero_epochs(const NPointPath& path);

}  // namespace brownflow
