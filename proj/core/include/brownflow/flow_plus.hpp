// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "brownflow/flow_pm.hpp"
#include "brownflow/noise.hpp"
#include "brownflow/stats.hpp"

namespace brownflow {

enum class PlusMode {
  // equal positive particles split once they reach 0; no merging
  kernel,
  // classes merge whenever their positions cross or meet
  coalescing,
};

struct PlusNPointPath : NPointPath {
  PlusMode mode = PlusMode::kernel;
};

// W_PLUS followed by AUX(0) .. AUX(n - 1).
std::vector<StreamLabel> plus_labels(std::size_t n_particles);

// Particles above 0 move with W+; a class at or below 0 moves with the
// AUX stream of its lowest-indexed member. Input order is arbitrary.
PlusNPointPath simulate_n_point_plus(std::span<const double> x0, const NoiseBundle& bundle,
                                     PlusMode mode, const NPointOptions& options = {});

struct KernelEstimate {
  double x0 = 0.0;
  double s = 0.0;
  double t = 0.0;
  std::vector<double> support;
  std::vector<double> weights;
  std::uint64_t w_plus_seed = 0;
  std::uint64_t inner_seed = 0;
};

// Terminal points of M one-point motions sharing `w_plus` (one increment
// per step of `window`) with independent W- streams keyed by
// (inner_seed, m).
KernelEstimate estimate_kernel_plus(double x0, const TimeGrid& window,
                                    std::span<const double> w_plus, std::size_t M,
                                    std::uint64_t inner_seed, std::uint64_t w_plus_seed = 0,
                                    std::size_t threads = 1);

double kernel_apply(const KernelEstimate& est, const std::function<double(double)>& f);

// Unbiased estimate of (K f)^2 from the support: distinct-pair average.
double kernel_apply_squared(const KernelEstimate& est, const std::function<double(double)>& f);

// True when x0 plus the running sum of w_plus stays above 0 at every step.
bool stays_positive(double x0, std::span<const double> w_plus);

struct TwoPointOptions {
  double x = 0.5;
  double horizon = 1.0;
  double dt = 1e-3;
  std::size_t outer = 1000;
  std::size_t inner = 256;
  std::size_t two_point_replicas = 20000;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
};

struct TwoPointReport {
  MCSummary squared_kernel;  // per outer W+: unbiased (K f)^2
  MCSummary two_point;       // f(X) f(Y), kernel-mode pair from (x, x)
  double difference = 0.0;
  double combined_stderr = 0.0;
  bool pass = false;
};

TwoPointReport two_point_correlation_check(const TwoPointOptions& options,
                                           const std::function<double(double)>& f);

}  // namespace brownflow
