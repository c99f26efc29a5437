// SPDX-License-Identifier: Apache-2.0
#include "brownflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "brownflow/pair_motion.hpp"
#include "brownflow/parallel.hpp"

namespace brownflow {

std::string to_json_line(const TestReport& report) {
  nlohmann::ordered_json j;
  j["name"] = report.name;
  j["statistic"] = report.statistic;
  j["value"] = report.value;
  j["tolerance"] = report.tolerance;
  j["pass"] = report.pass;
  j["n_replicas"] = report.n_replicas;
  j["seed_range"] = {report.seed_first, report.seed_last};
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.inputs) {
    if (std::isfinite(v)) {
      inputs[k] = v;
    } else {
      inputs[k] = nullptr;
    }
  }
  j["inputs"] = inputs;
  return j.dump();
}

namespace {

double ks_critical(std::size_t n, double level) {
  // invert the survival function by bisection
  double lo = 0.0, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_survival(mid) > level ? lo : hi) = mid;
  }
  const double rn = std::sqrt(static_cast<double>(n));
  return 0.5 * (lo + hi) / (rn + 0.12 + 0.11 / rn);
}

}  // namespace

TestReport ks_test(std::span<const double> samples, const std::function<double(double)>& cdf,
                   double level) {
  if (samples.size() < 50) throw std::invalid_argument("ks_test: need at least 50 samples");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("ks_test: level in (0, 1)");
  const KsResult ks = ks_one_sample(samples, cdf);
  TestReport r;
  r.name = "ks";
  r.statistic = "ks_distance";
  r.value = ks.statistic;
  r.tolerance = ks_critical(ks.n, level);
  r.pass = ks.p_value >= level;
  r.n_replicas = ks.n;
  r.inputs = {{"level", level}, {"p_value", ks.p_value}};
  return r;
}

std::vector<double> realized_covariation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("realized_covariation: length mismatch");
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t k = 1; k < a.size(); ++k) {
    out[k] = out[k - 1] + (a[k] - a[k - 1]) * (b[k] - b[k - 1]);
  }
  return out;
}

std::vector<TestFunction> test_function_library(std::size_t n) {
  if (n == 0) throw std::invalid_argument("test_function_library: n must be positive");
  std::vector<TestFunction> lib;

  lib.push_back({"linear",
                 [](std::span<const double> x) {
                   double s = 0.0;
                   for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<double>(i + 1) * x[i];
                   return s;
                 },
                 [](std::span<const double> x, std::span<double> g) {
                   for (std::size_t i = 0; i < x.size(); ++i) g[i] = static_cast<double>(i + 1);
                 },
                 [](std::span<const double>, std::span<double> hess) {
                   std::fill(hess.begin(), hess.end(), 0.0);
                 }});

  // prod_i exp(-x_i^2 / 2)
  lib.push_back({"gaussian_bump",
                 [](std::span<const double> x) {
                   double q = 0.0;
                   for (double v : x) q += v * v;
                   return std::exp(-0.5 * q);
                 },
                 [](std::span<const double> x, std::span<double> g) {
                   double q = 0.0;
                   for (double v : x) q += v * v;
                   const double f = std::exp(-0.5 * q);
                   for (std::size_t i = 0; i < x.size(); ++i) g[i] = -x[i] * f;
                 },
                 [](std::span<const double> x, std::span<double> hess) {
                   const std::size_t m = x.size();
                   double q = 0.0;
                   for (double v : x) q += v * v;
                   const double f = std::exp(-0.5 * q);
                   for (std::size_t i = 0; i < m; ++i) {
                     for (std::size_t j = 0; j < m; ++j) {
                       hess[i * m + j] = (x[i] * x[j] - (i == j ? 1.0 : 0.0)) * f;
                     }
                   }
                 }});

  // x_1 x_n (x_1^2 when n = 1)
  lib.push_back({"product_first_last",
                 [](std::span<const double> x) { return x.front() * x.back(); },
                 [](std::span<const double> x, std::span<double> g) {
                   std::fill(g.begin(), g.end(), 0.0);
                   g.front() += x.back();
                   g.back() += x.front();
                 },
                 [](std::span<const double> x, std::span<double> hess) {
                   const std::size_t m = x.size();
                   std::fill(hess.begin(), hess.end(), 0.0);
                   hess[0 * m + (m - 1)] += 1.0;
                   hess[(m - 1) * m + 0] += 1.0;
                 }});

  // exp(-(sum x)^2 / (2 n))
  lib.push_back({"bump_of_sum",
                 [](std::span<const double> x) {
                   const double s = std::accumulate(x.begin(), x.end(), 0.0);
                   return std::exp(-s * s / (2.0 * static_cast<double>(x.size())));
                 },
                 [](std::span<const double> x, std::span<double> g) {
                   const double m = static_cast<double>(x.size());
                   const double s = std::accumulate(x.begin(), x.end(), 0.0);
                   const double f = std::exp(-s * s / (2.0 * m));
                   std::fill(g.begin(), g.end(), -s / m * f);
                 },
                 [](std::span<const double> x, std::span<double> hess) {
                   const double m = static_cast<double>(x.size());
                   const double s = std::accumulate(x.begin(), x.end(), 0.0);
                   const double f = std::exp(-s * s / (2.0 * m));
                   std::fill(hess.begin(), hess.end(), (s * s / (m * m) - 1.0 / m) * f);
                 }});
  return lib;
}

CovarianceFn covariance_fn(CovarianceKind kind) {
  return [kind](double x, double y) { return covariance(kind, x, y); };
}

MCSummary martingale_residual(std::span<const NPointPath> paths, const TestFunction& f,
                              const CovarianceFn& cov) {
  if (!f.value || !f.hessian) {
    throw std::invalid_argument("martingale_residual: test function lacks derivatives");
  }
  std::vector<double> res(paths.size());
  for (std::size_t r = 0; r < paths.size(); ++r) {
    const NPointPath& p = paths[r];
    const std::size_t n = p.n_particles;
    std::vector<double> x(n), hess(n * n);
    std::vector<double> gen(p.grid.n_steps);
    auto load = [&](std::size_t k) {
      for (std::size_t i = 0; i < n; ++i) x[i] = p.position(i, k);
    };
    for (std::size_t k = 0; k < p.grid.n_steps; ++k) {
      load(k);
      f.hessian(x, hess);
      double a = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        a += 0.5 * hess[i * n + i];
        for (std::size_t j = i + 1; j < n; ++j) a += cov(x[i], x[j]) * hess[i * n + j];
      }
      gen[k] = a * p.grid.dt;
    }
    load(0);
    const double f0 = f.value(x);
    load(p.grid.n_steps);
    res[r] = f.value(x) - f0 - pairwise_sum(gen);
  }
  return summarize(res);
}

MCSummary martingale_residual(std::span<const NPointPath> paths, const TestFunction& f,
                              CovarianceKind cov) {
  return martingale_residual(paths, f, covariance_fn(cov));
}

CovariationSplit covariation_by_sign(std::span<const double> x, std::span<const double> y,
                                     double dt, CovarianceKind cov) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("covariation_by_sign: need equal lengths of at least 2");
  }
  CovariationSplit s;
  std::vector<double> same, mixed;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double c = (x[k + 1] - x[k]) * (y[k + 1] - y[k]);
    if (covariance(cov, x[k], y[k]) > 0.5) {
      same.push_back(c);
      s.time_same += dt;
    } else {
      mixed.push_back(c);
      s.time_mixed += dt;
    }
  }
  s.cov_same = pairwise_sum(same);
  s.cov_mixed = pairwise_sum(mixed);
  const double total = s.time_same + s.time_mixed;
  s.slope_error_same = std::abs(s.cov_same - s.time_same) / total;
  s.slope_error_mixed = std::abs(s.cov_mixed) / total;
  const double tol = 5.0 * std::sqrt(dt);
  s.pass = s.slope_error_same <= tol && s.slope_error_mixed <= tol;
  return s;
}

TestReport exit_probability_check(double alpha, double eps, std::size_t replicas,
                                  const ExitOptions& options) {
  if (!(alpha > 0.0) || !(alpha < eps)) {
    throw std::invalid_argument("exit_probability_check: need 0 < alpha < eps");
  }
  if (replicas == 0) throw std::invalid_argument("exit_probability_check: no replicas");
  PairMotionOptions pm;
  pm.dt_min = options.dt;
  pm.horizon = options.horizon;
  pm.separation_barrier = eps;
  pm.bridge_coalescence = true;
  std::vector<std::uint8_t> hit(replicas, 0), censored(replicas, 0);
  parallel_for(replicas, options.threads, [&](std::size_t r) {
    const PairMotionResult run =
        run_pair_motion(-0.5 * alpha, 0.5 * alpha, pm, replica_seed(options.seed, r));
    hit[r] = run.barrier_hit;
    censored[r] = run.censored;
  });
  const double n = static_cast<double>(replicas);
  const double p = std::accumulate(hit.begin(), hit.end(), 0.0) / n;
  const double cens = std::accumulate(censored.begin(), censored.end(), 0.0) / n;
  const double expected = alpha / eps;
  // binomial standard error under the hypothesis p = alpha / eps
  const double se = std::sqrt(expected * (1.0 - expected) / n);
  TestReport r;
  r.name = "exit_probability";
  r.statistic = "p_hat_minus_alpha_over_eps";
  r.value = p - expected;
  r.tolerance = 3.0 * se;
  r.pass = std::abs(r.value) <= r.tolerance;
  r.n_replicas = replicas;
  r.seed_first = replica_seed(options.seed, 0);
  r.seed_last = replica_seed(options.seed, replicas - 1);
  r.inputs = {{"alpha", alpha},     {"eps", eps},     {"p_hat", p},
              {"expected", expected}, {"std_error", se}, {"dt", options.dt},
              {"censored_fraction", cens}};
  return r;
}

std::vector<SurveyRow> coalescence_survey(std::span<const std::pair<double, double>> pairs,
                                          std::span<const double> horizons,
                                          std::size_t replicas, const SurveyOptions& options) {
  if (horizons.empty() || replicas == 0) return {};
  const double max_h = *std::max_element(horizons.begin(), horizons.end());
  std::vector<SurveyRow> rows;
  for (const auto& [x, y] : pairs) {
    const double lo = std::min(x, y), hi = std::max(x, y);
    PairMotionOptions pm;
    pm.dt_min = options.dt;
    pm.horizon = max_h;
    pm.bridge_coalescence = options.bridge_coalescence;
    std::vector<double> times(replicas, kNever);
    parallel_for(replicas, options.threads, [&](std::size_t r) {
      const PairMotionResult run = run_pair_motion(lo, hi, pm, replica_seed(options.seed, r));
      if (run.coalesced) times[r] = run.stop_time;
    });
    for (double h : horizons) {
      SurveyRow row;
      row.x = x;
      row.y = y;
      row.horizon = h;
      row.replicas = replicas;
      const double n = static_cast<double>(replicas);
      const auto met = std::count_if(times.begin(), times.end(),
                                     [h](double t) { return t <= h * (1.0 + 1e-12); });
      row.probability = static_cast<double>(met) / n;
      row.std_error = std::sqrt(row.probability * (1.0 - row.probability) / n);
      row.censored_fraction = 1.0 - row.probability;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace brownflow
