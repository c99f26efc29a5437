// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace brownflow {

struct Quantiles {
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
};

struct MCSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double variance = 0.0;  // unbiased sample variance
  std::optional<Quantiles> quantiles;
};

// Pairwise summation; the result depends only on the order of `values`.
double pairwise_sum(std::span<const double> values);

MCSummary summarize(std::span<const double> values, bool with_quantiles = false);

// Standard normal cdf and pdf.
double normal_cdf(double z);
double normal_pdf(double z);

// Kolmogorov limiting distribution: P(sqrt(n) D > lambda).
double kolmogorov_survival(double lambda);

struct KsResult {
  std::size_t n = 0;
  double statistic = 0.0;
  double p_value = 1.0;
};

// One-sample Kolmogorov-Smirnov test with Stephens' finite-n correction.
KsResult ks_one_sample(std::span<const double> samples,
                       const std::function<double(double)>& cdf);

}  // namespace brownflow
