// SPDX-License-Identifier: Apache-2.0
#include "brownflow/wedge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "brownflow/parallel.hpp"

namespace brownflow {

bool in_region(WedgeRegion region, double x, double y) {
  switch (region) {
    case WedgeRegion::half_plane: return x < 0.0;
    case WedgeRegion::d_wedge: return (x <= 0.0 && y >= 0.0) || (x >= 0.0 && y <= 0.0);
    case WedgeRegion::d_reflect: return x <= 0.0 || y <= 0.0;
    case WedgeRegion::d_plus: return x > 0.0 && y > 0.0;
    case WedgeRegion::custom: break;
  }
  throw std::invalid_argument("in_region: custom region has no membership rule");
}

WedgePath time_change(std::span<const double> x, std::span<const double> y,
                      std::span<const std::uint8_t> indicator, double dt, WedgeRegion region) {
  if (x.size() != y.size()) throw std::invalid_argument("time_change: path lengths differ");
  const std::size_t n_steps = x.empty() ? 0 : x.size() - 1;
  if (indicator.size() != n_steps) {
    throw std::invalid_argument("time_change: indicator length must equal the step count");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("time_change: dt must be positive");
  WedgePath w;
  w.region = region;
  std::size_t last = 0;
  std::size_t kept = 0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    if (!indicator[k]) continue;
    w.xr.push_back(x[k]);
    w.yr.push_back(y[k]);
    w.index_map.push_back(k);
    last = k;
    ++kept;
  }
  if (kept > 0) {
    w.xr.push_back(x[last + 1]);
    w.yr.push_back(y[last + 1]);
    w.index_map.push_back(last + 1);
  }
  w.grid_r = TimeGrid{0.0, dt, kept};
  w.l_est.assign(w.xr.size(), 0.0);
  return w;
}

std::vector<std::uint8_t> region_indicator(std::span<const double> x,
                                           std::span<const double> y, WedgeRegion region) {
  if (x.size() != y.size()) throw std::invalid_argument("region_indicator: lengths differ");
  std::vector<std::uint8_t> out(x.empty() ? 0 : x.size() - 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = in_region(region, x[k], y[k]);
  return out;
}

std::pair<std::vector<double>, std::vector<double>> uv_transform(const WedgePath& wedge) {
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<double> u(wedge.xr.size());
  std::vector<double> v(wedge.xr.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    u[k] = (wedge.yr[k] + wedge.xr[k]) * r;
    v[k] = (wedge.yr[k] - wedge.xr[k]) * r;
  }
  return {std::move(u), std::move(v)};
}

namespace {

// Hitting probabilities of `level` and of 0 for the motion between two
// samples a, b under the chosen bridge model.
struct BridgeOdds {
  BridgeModel model;
  double var;

  double hit_level(double a, double b, double level) const {
    if (b >= level) return 1.0;
    if (model == BridgeModel::none) return 0.0;
    return std::exp(-2.0 * (level - a) * (level - b) / var);
  }
  double touch_zero(double a, double b, double tol) const {
    if (b <= tol) return 1.0;
    if (model == BridgeModel::none) return 0.0;
    const double e = 2.0 * std::max(a, 0.0) * b / var;
    if (model == BridgeModel::free) return std::exp(-e);
    // |B| bridge: B's endpoints have equal sign with prob 1/(1+e^{-e})
    return 2.0 / (1.0 + std::exp(e));
  }
};

template <class Emit>
CrossingCount count_crossings(std::span<const double> d, double eps,
                              const CrossingOptions& options, Emit&& emit) {
  if (!(eps > 0.0)) throw std::invalid_argument("local_time_crossings: eps must be positive");
  if (options.bridge != BridgeModel::none && !(options.step_variance > 0.0)) {
    throw std::invalid_argument("local_time_crossings: bridge model needs step_variance");
  }
  const BridgeOdds odds{options.bridge, options.step_variance};
  const double tol = options.boundary_tol;
  CrossingCount out;
  out.eps = eps;
  if (d.empty()) return out;
  for (double v : d) {
    if (!(v >= -tol)) throw std::invalid_argument("local_time_crossings: negative distance");
  }
  bool armed = d[0] <= tol;
  double p_armed = armed ? 1.0 : 0.0;
  emit(0, 0.0);
  for (std::size_t k = 1; k < d.size(); ++k) {
    const double a = d[k - 1];
    const double b = d[k];
    if (armed) {
      if (b >= eps) {
        ++out.count;
        armed = false;
      }
    } else if (b <= tol) {
      armed = true;
    }
    if (options.bridge == BridgeModel::none) {
      out.expected_count = static_cast<double>(out.count);
    } else {
      const double hit = p_armed * odds.hit_level(a, b, eps);
      out.expected_count += hit;
      p_armed = p_armed - hit + (1.0 - p_armed) * odds.touch_zero(a, b, tol);
    }
    emit(k, eps * out.expected_count);
  }
  out.estimate = eps * out.expected_count;
  return out;
}

}  // namespace

CrossingCount local_time_crossings(std::span<const double> distance_path, double eps,
                                   const CrossingOptions& options) {
  return count_crossings(distance_path, eps, options, [](std::size_t, double) {});
}

std::vector<double> running_local_time(std::span<const double> distance_path, double eps,
                                       const CrossingOptions& options) {
  std::vector<double> out(distance_path.size());
  count_crossings(distance_path, eps, options, [&](std::size_t k, double v) { out[k] = v; });
  return out;
}

std::vector<double> boundary_distance(const WedgePath& wedge) {
  std::vector<double> d(wedge.xr.size());
  switch (wedge.region) {
    case WedgeRegion::half_plane:
      for (std::size_t k = 0; k < d.size(); ++k) d[k] = std::max(0.0, -wedge.xr[k]);
      return d;
    case WedgeRegion::d_wedge:
      for (std::size_t k = 0; k < d.size(); ++k) {
        d[k] = std::min(std::abs(wedge.xr[k]), std::abs(wedge.yr[k]));
      }
      return d;
    default:
      throw std::invalid_argument("boundary_distance: unsupported region");
  }
}

void attach_local_time(WedgePath& wedge, double eps, const CrossingOptions& options) {
  wedge.l_est = running_local_time(boundary_distance(wedge), eps, options);
}

AxisLocalTimes per_axis_local_times(const WedgePath& wedge, double eps,
                                    const CrossingOptions& options) {
  std::vector<double> ax(wedge.xr.size());
  std::vector<double> ay(wedge.yr.size());
  for (std::size_t k = 0; k < ax.size(); ++k) {
    ax[k] = std::abs(wedge.xr[k]);
    ay[k] = std::abs(wedge.yr[k]);
  }
  return {local_time_crossings(ax, eps, options).estimate,
          local_time_crossings(ay, eps, options).estimate};
}

LaplaceSamples laplace_identity_samples(const LaplaceOptions& options) {
  if (!(options.eps > 0.0)) throw std::invalid_argument("laplace_identity_samples: eps <= 0");
  PairMotionOptions pm;
  pm.dt_min = options.dt;
  pm.horizon = options.horizon;
  pm.crossing_eps = options.eps;
  LaplaceSamples out;
  out.samples.resize(options.replicas);
  parallel_for(options.replicas, options.threads, [&](std::size_t r) {
    const PairMotionResult run =
        run_pair_motion(options.x0, options.y0, pm, replica_seed(options.seed, r));
    LaplaceSample& s = out.samples[r];
    s.censored = !run.coalesced;
    s.t0 = run.time_in_d;
    s.t_minus_t0 = run.time_outside_d;
    s.t0_corner = run.time_in_d_at_corner;
    s.coalescence_time = run.stop_time;
    s.crossings = run.crossings;
    s.crossing_estimate = options.eps * static_cast<double>(run.crossings);
  });
  for (const auto& s : out.samples) out.censored += s.censored;
  return out;
}

LaplaceComparison compare_laplace(const LaplaceSamples& samples, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("compare_laplace: alpha < 0");
  std::vector<double> lhs, rhs, diff;
  const double k = 2.0 * std::sqrt(2.0 * alpha);
  for (const auto& s : samples.samples) {
    if (s.censored) continue;
    lhs.push_back(std::exp(-alpha * s.t_minus_t0));
    rhs.push_back(std::exp(-k * 0.5 * s.crossing_estimate));
    diff.push_back(lhs.back() - rhs.back());
  }
  LaplaceComparison c;
  c.alpha = alpha;
  c.lhs = summarize(lhs);
  c.rhs = summarize(rhs);
  c.diff = summarize(diff);
  c.combined_stderr = std::hypot(c.lhs.std_error, c.rhs.std_error);
  c.pass = std::abs(c.lhs.mean - c.rhs.mean) <= 3.0 * c.combined_stderr ||
           (c.combined_stderr == 0.0 && c.lhs.mean == c.rhs.mean);
  return c;
}

ReflectionReport reflection_decomposition_check(const WedgePath& wedge) {
  ReflectionReport r;
  r.elapsed = wedge.elapsed();
  r.tolerance = 5.0 * std::sqrt(wedge.grid_r.dt) * r.elapsed;
  const std::size_t n = wedge.xr.size();
  if (wedge.l_est.size() != n) throw std::invalid_argument("reflection check: l_est size");
  std::vector<double> q1(n > 0 ? n - 1 : 0), q2(q1.size()), qc(q1.size());
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double dl = wedge.l_est[k + 1] - wedge.l_est[k];
    const double d1 = wedge.xr[k + 1] - wedge.xr[k] + dl;
    const double d2 = wedge.yr[k + 1] - wedge.yr[k] + dl;
    q1[k] = d1 * d1;
    q2[k] = d2 * d2;
    qc[k] = d1 * d2;
  }
  r.qv_b1 = pairwise_sum(q1);
  r.qv_b2 = pairwise_sum(q2);
  r.cross = pairwise_sum(qc);
  r.qv_b1_pass = std::abs(r.qv_b1 - r.elapsed) <= r.tolerance;
  r.qv_b2_pass = std::abs(r.qv_b2 - r.elapsed) <= r.tolerance;
  r.cross_pass = std::abs(r.cross) <= r.tolerance;
  r.touched_boundary = n > 0 && wedge.l_est.back() > 0.0;
  return r;
}

CornerReport corner_decomposition_check(std::span<const double> x, std::span<const double> y,
                                        double dt) {
  const auto ind_r = region_indicator(x, y, WedgeRegion::d_reflect);
  std::vector<std::uint8_t> ind_p(ind_r.size());
  for (std::size_t k = 0; k < ind_r.size(); ++k) ind_p[k] = !ind_r[k];
  const WedgePath wr = time_change(x, y, ind_r, dt, WedgeRegion::d_reflect);
  const WedgePath wp = time_change(x, y, ind_p, dt, WedgeRegion::d_plus);

  CornerReport rep;
  rep.n_steps = ind_r.size();
  rep.reflect_steps = wr.n_steps();
  rep.plus_steps = wp.n_steps();

  // rebuild both coordinates from the two parts
  std::vector<double> bx(x.size()), by(y.size());
  std::vector<std::uint8_t> seen(x.size(), 0);
  bool consistent = true;
  for (const WedgePath* part : {&wr, &wp}) {
    for (std::size_t j = 0; j < part->index_map.size(); ++j) {
      const std::size_t k = part->index_map[j];
      if (seen[k] && (bx[k] != part->xr[j] || by[k] != part->yr[j])) consistent = false;
      bx[k] = part->xr[j];
      by[k] = part->yr[j];
      seen[k] = 1;
    }
  }
  rep.reassembly_exact = consistent && rep.reflect_steps + rep.plus_steps == rep.n_steps;
  for (std::size_t k = 0; k < x.size() && rep.reassembly_exact; ++k) {
    rep.reassembly_exact = seen[k] && bx[k] == x[k] && by[k] == y[k];
  }

  rep.separation_constant = true;
  const double margin = 5.0 * std::sqrt(dt);
  std::vector<double> incr;
  for (std::size_t k = 0; k < ind_p.size(); ++k) {
    if (!ind_p[k]) continue;
    if (y[k + 1] - x[k + 1] != y[k] - x[k]) rep.separation_constant = false;
    const double r0 = std::min(x[k], y[k]);
    if (r0 > margin) incr.push_back(std::min(x[k + 1], y[k + 1]) - r0);
  }
  rep.r_increments = incr.size();
  if (incr.size() >= 50) {
    const double sd = std::sqrt(dt);
    const KsResult ks = ks_one_sample(incr, [sd](double v) { return normal_cdf(v / sd); });
    rep.ks_statistic = ks.statistic;
    rep.ks_p_value = ks.p_value;
  }
  return rep;
}

MCSummary h_function_residual(std::span<const double> u, std::span<const double> v, double dt,
                              double margin) {
  if (u.size() != v.size()) throw std::invalid_argument("h_function_residual: lengths differ");
  auto h = [](double a, double b) { return (a * a + b * b) / (2.0 * b); };
  std::vector<double> res;
  for (std::size_t k = 0; k + 1 < u.size(); ++k) {
    const double a = u[k], b = v[k];
    if (!(b > margin && std::abs(a) < b - margin)) continue;
    const double hu = a / b;
    const double hv = 0.5 - a * a / (2.0 * b * b);
    const double lap = 1.0 / b + a * a / (b * b * b);
    const double du = u[k + 1] - a, dv = v[k + 1] - b;
    res.push_back(h(u[k + 1], v[k + 1]) - h(a, b) - hu * du - hv * dv - 0.5 * lap * dt);
  }
  return summarize(res);
}

}  // namespace brownflow
