// SPDX-License-Identifier: Apache-2.0
#include "brownflow/stats.hpp"

#include <algorithm>
#include <cmath>

namespace brownflow {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 16;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MCSummary summarize(std::span<const double> values, bool with_quantiles) {
  MCSummary out;
  out.n = values.size();
  if (out.n == 0) return out;
  out.mean = pairwise_sum(values) / static_cast<double>(out.n);
  if (out.n > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - out.mean;
      sq[i] = d * d;
    }
    out.variance = pairwise_sum(sq) / static_cast<double>(out.n - 1);
    out.std_error = std::sqrt(out.variance / static_cast<double>(out.n));
  }
  if (with_quantiles) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    auto q = [&](double p) {
      const double pos = p * static_cast<double>(sorted.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const auto hi = std::min(lo + 1, sorted.size() - 1);
      return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    };
    out.quantiles = Quantiles{q(0.05), q(0.5), q(0.95)};
  }
  return out;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_pdf(double z) {
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.3) {
    // theta-function form, accurate where the alternating series is slow
    constexpr double kPi = 3.14159265358979323846;
    const double c = std::sqrt(2.0 * kPi) / lambda;
    double s = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double a = (2 * k - 1) * kPi / (2.0 * lambda);
      s += std::exp(-0.5 * a * a);
    }
    return std::clamp(1.0 - c * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_one_sample(std::span<const double> samples,
                       const std::function<double(double)>& cdf) {
  KsResult out;
  out.n = samples.size();
  if (out.n == 0) return out;
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(out.n);
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  out.statistic = d;
  const double rn = std::sqrt(n);
  out.p_value = kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d);
  return out;
}

}  // namespace brownflow
