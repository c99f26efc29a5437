// SPDX-License-Identifier: Apache-2.0
#include "brownflow_cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <brownflow/chaos.hpp>
#include <brownflow/flow_plus.hpp>
#include <brownflow/flow_pm.hpp>
#include <brownflow/io.hpp>
#include <brownflow/noise.hpp>
#include <brownflow/parallel.hpp>
#include <brownflow/wedge.hpp>

namespace brownflow::cli {

using Json = nlohmann::ordered_json;

namespace {

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json summary_json_of(const MCSummary& s) {
  Json j = Json::object();
  j["n"] = s.n;
  j["mean"] = num(s.mean);
  j["std_error"] = num(s.std_error);
  j["variance"] = num(s.variance);
  return j;
}

std::vector<double> reals(const Json& a) {
  std::vector<double> v;
  for (const auto& e : a) v.push_back(e.get<double>());
  return v;
}

std::string padded(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return buf;
}

Json grid_json(const TimeGrid& g, double remainder) {
  Json j = Json::object();
  j["t_start"] = g.t_start;
  j["dt"] = g.dt;
  j["n_steps"] = g.n_steps;
  j["t_end"] = g.t_end();
  j["remainder"] = remainder;
  return j;
}

// Gaussian bump of width w and its heat-semigroup images.
struct Bump {
  double w = 1.0;
  double operator()(double x) const { return std::exp(-0.5 * x * x / (w * w)); }
  double heat(double x, double t) const {
    const double s = w * w + t;
    return w / std::sqrt(s) * std::exp(-0.5 * x * x / s);
  }
  // P_t (f^2)(x)
  double heat_squared(double x, double t) const {
    const double s = w * w + 2.0 * t;
    return w / std::sqrt(s) * std::exp(-x * x / s);
  }
};

TestReport mean_report(std::string name, const MCSummary& s, double expected, std::uint64_t seed,
                       std::size_t n) {
  TestReport r;
  r.name = std::move(name);
  r.statistic = "mean_minus_expected";
  r.value = s.mean - expected;
  r.tolerance = 3.0 * s.std_error;
  r.pass = std::abs(r.value) <= r.tolerance;
  r.n_replicas = n;
  r.seed_first = replica_seed(seed, 0);
  r.seed_last = replica_seed(seed, n - 1);
  r.inputs = {{"mean", s.mean}, {"expected", expected}, {"std_error", s.std_error}};
  return r;
}

// flow_pm and flow_plus_coalescing share the output layout.
RunOutcome run_n_point(const ExperimentConfig& c, std::size_t threads, ArtifactSet& out,
                       bool plus) {
  const std::vector<double> x0 = reals(c.params["x0"]);
  const GridFit fit = make_grid(0.0, c.real("horizon"), c.real("dt"));
  const TimeGrid grid = fit.grid;
  const std::size_t n = x0.size();
  const std::size_t replicas = c.count("replicas");
  const std::size_t kept = c.count("paths_written");
  const std::uint64_t seed = c.seed();
  const std::vector<StreamLabel> labels =
      plus ? plus_labels(n) : std::vector<StreamLabel>{StreamLabel::plus(), StreamLabel::minus()};
  const std::size_t n_pairs = n * (n - 1) / 2;

  std::vector<double> terminal(replicas * n), merge(replicas * n_pairs);
  std::vector<std::uint32_t> terminal_class(replicas * n);
  std::vector<NPointPath> written(kept);
  parallel_for(replicas, threads, [&](std::size_t r) {
    const NoiseBundle bundle = sample_bundle(grid, labels, replica_seed(seed, r));
    NPointPath p = plus ? static_cast<NPointPath>(
                              simulate_n_point_plus(x0, bundle, PlusMode::coalescing))
                        : simulate_n_point_pm(x0, bundle);
    for (std::size_t i = 0; i < n; ++i) {
      terminal[r * n + i] = p.position(i, grid.n_steps);
      terminal_class[r * n + i] = p.class_of(i, grid.n_steps);
    }
    std::copy(p.coalescence_times.begin(), p.coalescence_times.end(), merge.begin() + r * n_pairs);
    if (r < kept) written[r] = std::move(p);
  });

  std::ostringstream term;
  {
    CsvWriter w(term, {"replica", "particle_id", "class_id", "position"});
    for (std::size_t r = 0; r < replicas; ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        w.cell(std::uint64_t{r}).cell(std::uint64_t{i})
            .cell(std::uint64_t{terminal_class[r * n + i]}).cell(terminal[r * n + i]);
        w.end_row();
      }
    }
  }
  out.write("terminal.csv", term.str());

  Json pairs = Json::array();
  if (n_pairs > 0) {
    std::ostringstream co;
    CsvWriter w(co, {"replica", "i", "j", "coalescence_time"});
    for (std::size_t r = 0; r < replicas; ++r) {
      std::size_t k = 0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++k) {
          w.cell(std::uint64_t{r}).cell(std::uint64_t{i}).cell(std::uint64_t{j})
              .cell(merge[r * n_pairs + k]);
          w.end_row();
        }
      }
    }
    out.write("coalescence.csv", co.str());
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j, ++k) {
        std::size_t met = 0;
        for (std::size_t r = 0; r < replicas; ++r) met += merge[r * n_pairs + k] != kNever;
        const double p = static_cast<double>(met) / static_cast<double>(replicas);
        Json e = Json::object();
        e["i"] = i;
        e["j"] = j;
        e["merged_fraction"] = p;
        e["std_error"] = std::sqrt(p * (1.0 - p) / static_cast<double>(replicas));
        pairs.push_back(e);
      }
    }
  }
  for (std::size_t r = 0; r < kept; ++r) {
    std::ostringstream traj;
    write_trajectory_csv(traj, written[r]);
    out.write("trajectory_" + padded(r) + ".csv", traj.str());
    out.write("summary_" + padded(r) + ".json",
              summary_json(written[r], replica_seed(seed, r)) + "\n");
  }

  RunOutcome o;
  o.results["grid"] = grid_json(grid, fit.remainder);
  Json parts = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> d(replicas);
    for (std::size_t r = 0; r < replicas; ++r) d[r] = terminal[r * n + i] - x0[i];
    Json e = summary_json_of(summarize(d));
    e["particle_id"] = i;
    e["x0"] = x0[i];
    parts.push_back(e);
  }
  o.results["displacement"] = parts;
  o.results["pairs"] = pairs;
  return o;
}

RunOutcome run_kernel(const ExperimentConfig& c, std::size_t threads, ArtifactSet& out) {
  const double x0 = c.real("x0");
  const GridFit fit = make_grid(0.0, c.real("horizon"), c.real("dt"));
  const TimeGrid grid = fit.grid;
  const std::size_t outer = c.count("replicas");
  const std::size_t M = c.count("M");
  const std::uint64_t seed = c.seed();
  const Bump f{c.real("bump_width")};

  std::vector<double> kf(outer);
  std::vector<std::uint8_t> positive(outer);
  KernelEstimate first;
  parallel_for(outer, threads, [&](std::size_t r) {
    const std::uint64_t sd = replica_seed(seed, r);
    std::vector<double> wp(grid.n_steps);
    IncrementStream(sd, StreamLabel::plus(), grid.dt).fill(wp);
    KernelEstimate est = estimate_kernel_plus(x0, grid, wp, M, mix_seed(sd, 7), sd);
    kf[r] = kernel_apply(est, f);
    positive[r] = stays_positive(x0, wp);
    if (r == 0) first = std::move(est);
  });

  std::ostringstream vals;
  {
    CsvWriter w(vals, {"replica", "w_plus_seed", "stays_positive", "kernel_f"});
    for (std::size_t r = 0; r < outer; ++r) {
      w.cell(std::uint64_t{r}).cell(replica_seed(seed, r)).cell(std::uint64_t{positive[r]})
          .cell(kf[r]);
      w.end_row();
    }
  }
  out.write("kernel_values.csv", vals.str());
  std::ostringstream support;
  write_kernel_csv(support, first);
  out.write("kernel_support_0000.csv", support.str());

  RunOutcome o;
  const MCSummary s = summarize(kf);
  const double expected = f.heat(x0, grid.duration());
  TestReport r = mean_report("kernel_mean", s, expected, seed, outer);
  r.inputs["x0"] = x0;
  r.inputs["M"] = static_cast<double>(M);
  o.pass = r.pass;
  o.reports.push_back(r);
  o.results["grid"] = grid_json(grid, fit.remainder);
  o.results["kernel_f"] = summary_json_of(s);
  o.results["heat_reference"] = expected;
  return o;
}

RunOutcome run_laplace(const ExperimentConfig& c, std::size_t threads, ArtifactSet& out) {
  LaplaceOptions lo;
  lo.x0 = c.real("x0");
  lo.y0 = c.real("y0");
  lo.dt = c.real("dt");
  lo.eps = c.real("eps");
  lo.horizon = c.real("horizon");
  lo.replicas = c.count("replicas");
  lo.seed = c.seed();
  lo.threads = threads;
  const LaplaceSamples ls = laplace_identity_samples(lo);

  std::ostringstream samples;
  {
    CsvWriter w(samples, {"replica", "censored", "t0", "t_minus_t0", "t0_corner",
                          "coalescence_time", "crossings", "crossing_estimate"});
    for (std::size_t r = 0; r < ls.samples.size(); ++r) {
      const LaplaceSample& s = ls.samples[r];
      w.cell(std::uint64_t{r}).cell(std::uint64_t{s.censored}).cell(s.t0).cell(s.t_minus_t0)
          .cell(s.t0_corner).cell(s.coalescence_time).cell(s.crossings).cell(s.crossing_estimate);
      w.end_row();
    }
  }
  out.write("laplace_samples.csv", samples.str());

  RunOutcome o;
  std::ostringstream table;
  CsvWriter w(table, {"alpha", "lhs_mean", "lhs_std_error", "rhs_mean", "rhs_std_error",
                      "difference", "combined_std_error", "pass"});
  for (double alpha : reals(c.params["alpha"])) {
    const LaplaceComparison cmp = compare_laplace(ls, alpha);
    w.cell(alpha).cell(cmp.lhs.mean).cell(cmp.lhs.std_error).cell(cmp.rhs.mean)
        .cell(cmp.rhs.std_error).cell(cmp.lhs.mean - cmp.rhs.mean).cell(cmp.combined_stderr)
        .cell(std::uint64_t{cmp.pass});
    w.end_row();
    TestReport r;
    r.name = "laplace_identity";
    r.statistic = "lhs_minus_rhs";
    r.value = cmp.lhs.mean - cmp.rhs.mean;
    r.tolerance = 3.0 * cmp.combined_stderr;
    r.pass = cmp.pass;
    r.n_replicas = lo.replicas;
    r.seed_first = replica_seed(lo.seed, 0);
    r.seed_last = replica_seed(lo.seed, lo.replicas - 1);
    r.inputs = {{"alpha", alpha},        {"eps", lo.eps},
                {"dt", lo.dt},           {"lhs", cmp.lhs.mean},
                {"rhs", cmp.rhs.mean},   {"combined_std_error", cmp.combined_stderr}};
    o.reports.push_back(r);
  }
  out.write("laplace.csv", table.str());

  TestReport cens;
  cens.name = "laplace_censoring";
  cens.statistic = "censored_fraction";
  cens.value = ls.censored_fraction();
  cens.tolerance = 0.01;
  cens.pass = cens.value < cens.tolerance;
  cens.n_replicas = lo.replicas;
  cens.seed_first = replica_seed(lo.seed, 0);
  cens.seed_last = replica_seed(lo.seed, lo.replicas - 1);
  cens.inputs = {{"horizon", lo.horizon}};
  o.reports.push_back(cens);

  const Json& exits = c.params["exit"];
  if (!exits.empty()) {
    std::ostringstream ex;
    CsvWriter we(ex, {"alpha", "eps", "p_hat", "expected", "std_error", "pass"});
    for (std::size_t i = 0; i < exits.size(); ++i) {
      ExitOptions eo;
      eo.dt = lo.dt;
      eo.seed = mix_seed(lo.seed, 0xe1 + i);
      eo.threads = threads;
      const TestReport r = exit_probability_check(exits[i]["alpha"].get<double>(),
                                                  exits[i]["eps"].get<double>(),
                                                  c.count("exit_replicas"), eo);
      we.cell(r.inputs.at("alpha")).cell(r.inputs.at("eps")).cell(r.inputs.at("p_hat"))
          .cell(r.inputs.at("expected")).cell(r.inputs.at("std_error"))
          .cell(std::uint64_t{r.pass});
      we.end_row();
      o.reports.push_back(r);
    }
    out.write("exit.csv", ex.str());
  }
  o.results["censored_fraction"] = ls.censored_fraction();
  for (const auto& r : o.reports) o.pass = o.pass && r.pass;
  return o;
}

RunOutcome run_chaos(const ExperimentConfig& c, std::size_t threads, ArtifactSet& out) {
  const double x0 = c.real("x0");
  const GridFit fit = make_grid(0.0, c.real("horizon"), c.real("dt"));
  const TimeGrid grid = fit.grid;
  const std::size_t replicas = c.count("replicas");
  const std::size_t M = c.count("M");
  const std::uint64_t seed = c.seed();
  const Bump f{c.real("bump_width")};
  ChaosSettings settings;
  settings.n_max = c.count("n_max");
  settings.cov = CovarianceKind::c_plus;
  const std::size_t nodes = c.count("nodes") | 1u;
  const double half = 8.0 * std::sqrt(grid.duration() + f.w * f.w);
  const FunctionGrid fg = FunctionGrid::sample(f, -half, half, nodes);
  const std::size_t levels = settings.n_max + 1;

  std::vector<double> chaos(replicas), nested(replicas), per_level(replicas * levels);
  parallel_for(replicas, threads, [&](std::size_t r) {
    const std::uint64_t sd = replica_seed(seed, r);
    std::vector<double> wp(grid.n_steps);
    IncrementStream(sd, StreamLabel::plus(), grid.dt).fill(wp);
    const ChaosStack stack = build_chaos_stack(fg, grid, ChaosNoise{wp, {}}, settings);
    for (std::size_t l = 0; l < levels; ++l) per_level[r * levels + l] = stack.value(l, x0);
    chaos[r] = stack.sum(x0);
    nested[r] = kernel_apply(estimate_kernel_plus(x0, grid, wp, M, mix_seed(sd, 7), sd), f);
  });

  std::ostringstream csv;
  {
    std::vector<std::string> header{"replica", "chaos_sum", "nested_mc"};
    for (std::size_t l = 0; l < levels; ++l) header.push_back("level_" + std::to_string(l));
    CsvWriter w(csv, header);
    for (std::size_t r = 0; r < replicas; ++r) {
      w.cell(std::uint64_t{r}).cell(chaos[r]).cell(nested[r]);
      for (std::size_t l = 0; l < levels; ++l) w.cell(per_level[r * levels + l]);
      w.end_row();
    }
  }
  out.write("chaos.csv", csv.str());

  std::ostringstream diag;
  {
    CsvWriter w(diag, {"level", "sample_mean", "sample_var", "stderr"});
    for (std::size_t l = 0; l < levels; ++l) {
      std::vector<double> v(replicas);
      for (std::size_t r = 0; r < replicas; ++r) v[r] = per_level[r * levels + l];
      const MCSummary s = summarize(v);
      w.cell(std::uint64_t{l}).cell(s.mean).cell(s.variance).cell(s.std_error);
      w.end_row();
    }
  }
  out.write("chaos_levels.csv", diag.str());

  RunOutcome o;
  auto base = [&](TestReport& r) {
    r.n_replicas = replicas;
    r.seed_first = replica_seed(seed, 0);
    r.seed_last = replica_seed(seed, replicas - 1);
  };
  std::vector<double> diff(replicas);
  for (std::size_t r = 0; r < replicas; ++r) diff[r] = chaos[r] - nested[r];
  const MCSummary d = summarize(diff);
  TestReport rd = mean_report("chaos_vs_nested", d, 0.0, seed, replicas);
  rd.inputs["n_max"] = static_cast<double>(settings.n_max);
  o.reports.push_back(rd);
  for (std::size_t l = 1; l < levels; ++l) {
    std::vector<double> v(replicas);
    for (std::size_t r = 0; r < replicas; ++r) v[r] = per_level[r * levels + l];
    TestReport rl = mean_report("chaos_level_mean", summarize(v), 0.0, seed, replicas);
    rl.inputs["level"] = static_cast<double>(l);
    o.reports.push_back(rl);
  }
  // sample variance of the chaos sum against Var(K f) <= P_t f^2 - (P_t f)^2
  const MCSummary cs = summarize(chaos);
  std::vector<double> dev2(replicas);
  for (std::size_t r = 0; r < replicas; ++r) dev2[r] = (chaos[r] - cs.mean) * (chaos[r] - cs.mean);
  const MCSummary v2 = summarize(dev2);
  const double t = grid.duration();
  const double bound = f.heat_squared(x0, t) - f.heat(x0, t) * f.heat(x0, t);
  TestReport rv;
  rv.name = "chaos_variance_bound";
  rv.statistic = "variance_minus_bound";
  rv.value = cs.variance - bound;
  rv.tolerance = 3.0 * v2.std_error;
  rv.pass = rv.value <= rv.tolerance;
  rv.inputs = {{"variance", cs.variance}, {"bound", bound}};
  base(rv);
  o.reports.push_back(rv);

  o.results["grid"] = grid_json(grid, fit.remainder);
  o.results["chaos_sum"] = summary_json_of(cs);
  o.results["nested_mc"] = summary_json_of(summarize(nested));
  o.results["heat_reference"] = f.heat(x0, t);
  for (const auto& r : o.reports) o.pass = o.pass && r.pass;
  return o;
}

RunOutcome run_verify(const ExperimentConfig& c, std::size_t threads, ArtifactSet& out) {
  const std::uint64_t seed = c.seed();
  const double dt = c.real("dt");
  const std::size_t replicas = c.count("replicas");
  const TimeGrid grid = make_grid(0.0, 1.0, dt).grid;
  RunOutcome o;
  std::uint64_t test_id = 0;
  auto sub_seed = [&] { return mix_seed(seed, ++test_id); };
  auto seeds = [&](TestReport& r, std::uint64_t s, std::size_t n) {
    r.n_replicas = n;
    r.seed_first = replica_seed(s, 0);
    r.seed_last = replica_seed(s, n - 1);
  };

  // one-point marginals against N(x0, 1)
  for (double x0 : reals(c.params["ks_starts"])) {
    const std::uint64_t s = sub_seed();
    std::vector<double> v(replicas);
    parallel_for(replicas, threads, [&](std::size_t r) {
      std::vector<double> wp(grid.n_steps), wm(grid.n_steps);
      const std::uint64_t sd = replica_seed(s, r);
      IncrementStream(sd, StreamLabel::plus(), grid.dt).fill(wp);
      IncrementStream(sd, StreamLabel::minus(), grid.dt).fill(wm);
      v[r] = terminal_one_point_pm(x0, wp, wm);
    });
    const double t = grid.duration();
    TestReport r = ks_test(v, [x0, t](double y) { return normal_cdf((y - x0) / std::sqrt(t)); });
    r.name = "one_point_marginal";
    r.inputs["x0"] = x0;
    seeds(r, s, replicas);
    o.reports.push_back(r);
  }

  const Json& exits = c.params["exit"];
  for (const auto& e : exits) {
    ExitOptions eo;
    eo.dt = c.real("exit_dt");
    eo.seed = sub_seed();
    eo.threads = threads;
    o.reports.push_back(
        exit_probability_check(e["alpha"].get<double>(), e["eps"].get<double>(), replicas, eo));
  }

  // covariation by sign class on 2-point paths of both flows
  const double pair_start[2] = {-0.3, 0.4};
  for (int plus = 0; plus < 2; ++plus) {
    const std::uint64_t s = sub_seed();
    const std::size_t n = std::min<std::size_t>(replicas, 500);
    std::vector<std::uint8_t> ok(n);
    parallel_for(n, threads, [&](std::size_t r) {
      if (plus) {
        const NoiseBundle b = sample_bundle(grid, plus_labels(2), replica_seed(s, r));
        const NPointPath p = simulate_n_point_plus(pair_start, b, PlusMode::kernel);
        ok[r] = covariation_by_sign(p.trajectory(0), p.trajectory(1), dt, CovarianceKind::c_plus)
                    .pass;
      } else {
        const std::vector<StreamLabel> labels{StreamLabel::plus(), StreamLabel::minus()};
        const NoiseBundle b = sample_bundle(grid, labels, replica_seed(s, r));
        const NPointPath p = simulate_n_point_pm(pair_start, b);
        ok[r] =
            covariation_by_sign(p.trajectory(0), p.trajectory(1), dt, CovarianceKind::c_pm).pass;
      }
    });
    TestReport r;
    r.name = plus ? "covariation_plus" : "covariation_pm";
    r.statistic = "fraction_within_5_sqrt_dt";
    r.value = static_cast<double>(std::count(ok.begin(), ok.end(), 1)) / static_cast<double>(n);
    r.tolerance = 0.95;
    r.pass = r.value >= r.tolerance;
    r.inputs = {{"dt", dt}};
    seeds(r, s, n);
    o.reports.push_back(r);
  }

  // martingale problem residuals
  const std::vector<std::vector<double>> starts{{0.2}, {-0.3, 0.4}, {-0.5, 0.1, 0.6}};
  for (int plus = 0; plus < 2; ++plus) {
    for (const auto& x0 : starts) {
      const std::uint64_t s = sub_seed();
      const std::vector<StreamLabel> labels =
          plus ? plus_labels(x0.size())
               : std::vector<StreamLabel>{StreamLabel::plus(), StreamLabel::minus()};
      std::vector<NPointPath> paths(replicas);
      parallel_for(replicas, threads, [&](std::size_t r) {
        const NoiseBundle b = sample_bundle(grid, labels, replica_seed(s, r));
        NPointOptions opt;
        opt.record_pairs = false;
        paths[r] = plus ? static_cast<NPointPath>(simulate_n_point_plus(x0, b, PlusMode::kernel, opt))
                        : simulate_n_point_pm(x0, b, opt);
      });
      for (const TestFunction& f : test_function_library(x0.size())) {
        const MCSummary m =
            martingale_residual(paths, f, plus ? CovarianceKind::c_plus : CovarianceKind::c_pm);
        TestReport r = mean_report((plus ? "martingale_plus/" : "martingale_pm/") + f.name, m,
                                   0.0, s, replicas);
        r.statistic = "mean_residual";
        r.inputs["n"] = static_cast<double>(x0.size());
        o.reports.push_back(r);
      }
    }
  }

  {
    // a generator that ignores the covariance term must be rejected
    const std::uint64_t s = sub_seed();
    const double x0[2] = {1.0, 2.0};
    std::vector<NPointPath> paths(replicas);
    parallel_for(replicas, threads, [&](std::size_t r) {
      const NoiseBundle b = sample_bundle(
          grid, std::vector<StreamLabel>{StreamLabel::plus(), StreamLabel::minus()},
          replica_seed(s, r));
      NPointOptions opt;
      opt.record_pairs = false;
      paths[r] = simulate_n_point_pm(x0, b, opt);
    });
    const TestFunction f = test_function_library(2)[2];
    const MCSummary m = martingale_residual(paths, f, zero_covariance());
    TestReport r;
    r.name = "martingale_negative_control";
    r.statistic = "abs_z_score";
    r.value = std::abs(m.mean) / m.std_error;
    r.tolerance = 3.0;
    r.pass = r.value > r.tolerance;
    r.inputs = {{"mean", m.mean}, {"std_error", m.std_error}};
    seeds(r, s, replicas);
    o.reports.push_back(r);
  }

  {
    // epsilon-crossing local time of reflected Brownian motion at level 0
    const std::uint64_t s = sub_seed();
    const std::size_t n = c.count("local_time_replicas");
    const TimeGrid g = make_grid(0.0, 1.0, c.real("local_time_dt")).grid;
    const double eps = c.real("local_time_eps");
    std::vector<double> v(n);
    parallel_for(n, threads, [&](std::size_t r) {
      std::vector<double> w(g.n_steps);
      IncrementStream(replica_seed(s, r), StreamLabel::plus(), g.dt).fill(w);
      std::vector<double> b = cumulate(w);
      for (double& x : b) x = std::abs(x);
      CrossingOptions co;
      co.bridge = BridgeModel::reflected;
      co.step_variance = g.dt;
      v[r] = local_time_crossings(b, eps, co).estimate;
    });
    TestReport r = mean_report("local_time_reflected", summarize(v), std::sqrt(2.0 / M_PI), s, n);
    r.inputs["eps"] = eps;
    r.inputs["dt"] = g.dt;
    o.reports.push_back(r);
  }

  std::ostringstream lines;
  for (const auto& r : o.reports) {
    lines << to_json_line(r) << "\n";
    o.pass = o.pass && r.pass;
  }
  out.write("reports.jsonl", lines.str());
  std::size_t failed = 0;
  for (const auto& r : o.reports) failed += !r.pass;
  o.results["tests"] = o.reports.size();
  o.results["failed"] = failed;
  return o;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, std::size_t threads, ArtifactSet& out) {
  RunOutcome o;
  switch (config.experiment) {
    case Experiment::flow_pm:
      o = run_n_point(config, threads, out, false);
      break;
    case Experiment::flow_plus_coalescing:
      o = run_n_point(config, threads, out, true);
      break;
    case Experiment::flow_plus_kernel:
      o = run_kernel(config, threads, out);
      break;
    case Experiment::wedge_laplace:
      o = run_laplace(config, threads, out);
      break;
    case Experiment::chaos_compare:
      o = run_chaos(config, threads, out);
      break;
    case Experiment::verify_suite:
      o = run_verify(config, threads, out);
      break;
  }
  out.write("results.json", o.results.dump(2) + "\n");
  return o;
}

}  // namespace brownflow::cli
