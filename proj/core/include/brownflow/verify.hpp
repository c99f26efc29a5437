// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "brownflow/flow_pm.hpp"
#include "brownflow/noise.hpp"
#include "brownflow/stats.hpp"

namespace brownflow {

struct TestReport {
  std::string name;
  std::string statistic;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::size_t n_replicas = 0;
  std::uint64_t seed_first = 0;
  std::uint64_t seed_last = 0;
  // echo of inputs and auxiliary outputs, numeric only
  std::map<std::string, double> inputs;
};

// One JSON object on a single line.
std::string to_json_line(const TestReport& report);

// pass <=> p-value >= level. value = D, tolerance = the level-critical D.
TestReport ks_test(std::span<const double> samples, const std::function<double(double)>& cdf,
                   double level = 0.01);

// out[k] = sum_{j<k} (a[j+1]-a[j]) (b[j+1]-b[j]); out[0] = 0.
std::vector<double> realized_covariation(std::span<const double> a, std::span<const double> b);

// Test function of n variables with closed-form Hessian.
struct TestFunction {
  std::string name;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  // row-major n x n
  std::function<void(std::span<const double>, std::span<double>)> hessian;
};

// linear, gaussian_bump, product_first_last, bump_of_sum.
std::vector<TestFunction> test_function_library(std::size_t n);

using CovarianceFn = std::function<double(double, double)>;
CovarianceFn covariance_fn(CovarianceKind kind);
inline CovarianceFn zero_covariance() {
  return [](double, double) { return 0.0; };
}

// Per replica f(X_t) - f(X_0) - sum_k A f(X_k) dt with
// A f = lap f / 2 + sum_{i<j} C(x_i, x_j) d_ij f.
MCSummary martingale_residual(std::span<const NPointPath> paths, const TestFunction& f,
                              const CovarianceFn& cov);
MCSummary martingale_residual(std::span<const NPointPath> paths, const TestFunction& f,
                              CovarianceKind cov);

// Realized covariation of a pair split by sign class of the left point.
struct CovariationSplit {
  double time_same = 0.0;   // C = 1 steps
  double time_mixed = 0.0;  // C = 0 steps
  double cov_same = 0.0;
  double cov_mixed = 0.0;
  // |cov - C time| / total time for each class, compared to 5 sqrt(dt)
  double slope_error_same = 0.0;
  double slope_error_mixed = 0.0;
  bool pass = false;
};

CovariationSplit covariation_by_sign(std::span<const double> x, std::span<const double> y,
                                     double dt, CovarianceKind cov);

struct ExitOptions {
  double dt = 1e-5;
  double horizon = 1e4;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
};

// Pair started at (-alpha/2, alpha/2); estimates P(separation reaches
// eps before coalescence). value = p_hat - alpha/eps, tolerance = 3 se.
TestReport exit_probability_check(double alpha, double eps, std::size_t replicas,
                                  const ExitOptions& options = {});

struct SurveyOptions {
  double dt = 1e-5;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  bool bridge_coalescence = false;
};

struct SurveyRow {
  double x = 0.0;
  double y = 0.0;
  double horizon = 0.0;
  double probability = 0.0;
  double std_error = 0.0;
  // replicas still separated at the horizon
  double censored_fraction = 0.0;
  std::size_t replicas = 0;
};

// Empirical P(T <= horizon) for each pair and horizon; every pair runs
// once up to its largest horizon, so rows are monotone in the horizon.
std::vector<SurveyRow> coalescence_survey(std::span<const std::pair<double, double>> pairs,
                                          std::span<const double> horizons,
                                          std::size_t replicas, const SurveyOptions& options = {});

}  // namespace brownflow
