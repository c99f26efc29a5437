// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "brownflow/noise.hpp"

namespace brownflow {

// Piecewise linear function on uniform nodes x_min + i h, extended by
// its end values outside the node range.
class FunctionGrid {
 public:
  FunctionGrid() = default;
  FunctionGrid(double x_min, double h, std::vector<double> values);

  static FunctionGrid sample(const std::function<double(double)>& f, double x_min, double x_max,
                             std::size_t n_nodes);
  // Same nodes as `like`.
  static FunctionGrid sample_like(const std::function<double(double)>& f,
                                  const FunctionGrid& like);

  double operator()(double x) const;

  double x_min() const { return x_min_; }
  double x_max() const { return x_min_ + h_ * static_cast<double>(values_.size() - 1); }
  double spacing() const { return h_; }
  std::size_t size() const { return values_.size(); }
  double node(std::size_t i) const { return x_min_ + h_ * static_cast<double>(i); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  // Set once an evaluation fell outside the node range.
  bool clamped() const { return clamped_; }
  void clear_clamped() const { clamped_ = false; }

 private:
  double x_min_ = 0.0;
  double h_ = 1.0;
  std::vector<double> values_;
  mutable bool clamped_ = false;
};

// P_tau f at the nodes, integrating the interpolant exactly against the
// Gaussian kernel. tau = 0 returns f.
FunctionGrid heat_apply(const FunctionGrid& f, double tau);
// (P_tau f)' at the nodes; tau must be positive.
FunctionGrid heat_derivative(const FunctionGrid& f, double tau);

// Driving increments of one chaos replica. w_minus is read for C_PM only.
struct ChaosNoise {
  std::span<const double> w_plus;
  std::span<const double> w_minus;
};

struct ChaosSettings {
  std::size_t n_max = 6;
  CovarianceKind cov = CovarianceKind::c_plus;
};

// Levels J^0 .. J^n_max of the expansion over `window` as functions of
// the starting point. Computed by a backward sweep on the periodic
// extension of f's node range, so f should be negligible near both ends.
class ChaosStack {
 public:
  TimeGrid window;
  std::size_t n_max = 0;
  std::vector<FunctionGrid> levels;

  double value(std::size_t level, double x) const;
  double sum(double x) const;
};

ChaosStack build_chaos_stack(const FunctionGrid& f, const TimeGrid& window, ChaosNoise noise,
                             const ChaosSettings& settings);

double chaos_term(const FunctionGrid& f, const TimeGrid& window, std::size_t level,
                  ChaosNoise noise, const ChaosSettings& settings, double x);

struct ChaosSum {
  double value = 0.0;
  std::vector<double> per_level;
};

ChaosSum chaos_sum(const FunctionGrid& f, const TimeGrid& window, ChaosNoise noise,
                   const ChaosSettings& settings, double x);

// Default spatial grid: [-8 sqrt(t), 8 sqrt(t)] with 2^12 + 1 nodes.
FunctionGrid default_chaos_grid(const std::function<double(double)>& f, double t_total);

// Sums groups of `factor` consecutive increments.
std::vector<double> coarsen_increments(std::span<const double> w, std::size_t factor);

}  // namespace brownflow
