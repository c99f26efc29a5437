// SPDX-License-Identifier: Apache-2.0
#include "brownflow/flow_plus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "brownflow/parallel.hpp"

namespace brownflow {

std::vector<StreamLabel> plus_labels(std::size_t n_particles) {
  std::vector<StreamLabel> labels{StreamLabel::plus()};
  for (std::size_t j = 0; j < n_particles; ++j) {
    labels.push_back(StreamLabel::aux(static_cast<std::uint32_t>(j)));
  }
  return labels;
}

namespace {

struct PlusClass {
  double pos;
  std::uint32_t rep;
  std::vector<std::uint32_t> members;
};

void check_range(double x) {
  if (std::abs(x) >= kLatticeRange) {
    throw std::range_error("particle left the exact-arithmetic range");
  }
}

}  // namespace

PlusNPointPath simulate_n_point_plus(std::span<const double> x0, const NoiseBundle& bundle,
                                     PlusMode mode, const NPointOptions& options) {
  if (!bundle.has(StreamLabel::plus())) throw std::invalid_argument("bundle lacks W_PLUS");
  std::vector<std::span<const double>> aux;
  for (std::size_t j = 0; j < x0.size(); ++j) {
    const StreamLabel label = StreamLabel::aux(static_cast<std::uint32_t>(j));
    if (!bundle.has(label)) {
      throw std::invalid_argument("bundle lacks " + label.to_string());
    }
    aux.push_back(bundle.increments(label));
  }
  for (double x : x0) {
    if (!std::isfinite(x) || std::abs(x) >= kLatticeRange) {
      throw std::invalid_argument("initial position not finite or out of range");
    }
  }
  const auto wp = bundle.increments(StreamLabel::plus());
  const std::size_t first = options.first_step;
  const std::size_t last = std::min(options.last_step, bundle.grid().n_steps);
  if (first > last) throw std::invalid_argument("step window is empty or reversed");

  PlusNPointPath path;
  path.mode = mode;
  path.grid = TimeGrid{bundle.grid().time_at(first), bundle.grid().dt, last - first};
  path.n_particles = x0.size();
  path.merge_tol = merge_tolerance(x0);
  const std::size_t ns = path.n_samples();
  const double tol = path.merge_tol;
  path.positions.resize(path.n_particles * ns);
  path.classes.resize(path.n_particles * ns);
  if (options.record_pairs && path.n_particles > 1) {
    path.coalescence_times.assign(path.n_particles * (path.n_particles - 1) / 2, kNever);
  }

  // classes in position order, ties by index
  std::vector<std::uint32_t> order(x0.size());
  std::iota(order.begin(), order.end(), 0u);
  std::vector<double> start(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) start[i] = to_lattice(x0[i]);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return start[a] < start[b]; });
  std::vector<PlusClass> classes;
  for (std::uint32_t i : order) {
    if (!classes.empty() && start[i] - classes.back().pos <= tol) {
      classes.back().members.push_back(i);
      classes.back().rep = std::min(classes.back().rep, i);
    } else {
      classes.push_back({start[i], i, {i}});
    }
  }

  auto mark = [&](double t, const PlusClass& a, const PlusClass& b) {
    if (path.coalescence_times.empty()) return;
    for (std::uint32_t i : a.members) {
      for (std::uint32_t j : b.members) {
        double& slot = path.coalescence_times[path.pair_index(i, j)];
        if (slot == kNever) slot = t;
      }
    }
  };
  for (const auto& c : classes) {
    for (std::size_t a = 0; a < c.members.size(); ++a) {
      for (std::size_t b = a + 1; b < c.members.size(); ++b) {
        mark(path.grid.t_start, PlusClass{0, 0, {c.members[a]}}, PlusClass{0, 0, {c.members[b]}});
      }
    }
  }

  auto split_nonpositive = [&] {
    if (mode != PlusMode::kernel) return;
    std::vector<PlusClass> out;
    out.reserve(classes.size());
    for (auto& c : classes) {
      if (c.pos > 0.0 || c.members.size() == 1) {
        out.push_back(std::move(c));
        continue;
      }
      std::sort(c.members.begin(), c.members.end());
      for (std::uint32_t m : c.members) out.push_back({c.pos, m, {m}});
    }
    classes = std::move(out);
  };
  auto record = [&](std::size_t k) {
    for (const auto& c : classes) {
      for (std::uint32_t p : c.members) {
        path.positions[p * ns + k] = c.pos;
        path.classes[p * ns + k] = c.rep;
      }
    }
  };

  split_nonpositive();
  record(0);
  std::vector<double> prefix_max, suffix_min;
  for (std::size_t k = 0; k < path.grid.n_steps; ++k) {
    const std::size_t kk = first + k;
    for (auto& c : classes) {
      c.pos += c.pos > 0.0 ? wp[kk] : aux[c.rep][kk];
      check_range(c.pos);
    }
    if (mode == PlusMode::coalescing && classes.size() > 1) {
      // blocks of classes connected by order inversions or contact
      const std::size_t n = classes.size();
      prefix_max.assign(n, 0.0);
      suffix_min.assign(n, 0.0);
      for (std::size_t c = 0; c < n; ++c) {
        prefix_max[c] = c == 0 ? classes[c].pos : std::max(prefix_max[c - 1], classes[c].pos);
      }
      for (std::size_t c = n; c-- > 0;) {
        suffix_min[c] = c + 1 == n ? classes[c].pos : std::min(suffix_min[c + 1], classes[c].pos);
      }
      const double t = path.grid.time_at(k + 1);
      std::vector<PlusClass> merged;
      std::size_t b0 = 0;
      for (std::size_t c = 0; c < n; ++c) {
        const bool cut = c + 1 == n || prefix_max[c] + tol < suffix_min[c + 1];
        if (!cut) continue;
        PlusClass block = std::move(classes[b0]);
        for (std::size_t m = b0 + 1; m <= c; ++m) {
          mark(t, block, classes[m]);
          if (classes[m].rep < block.rep) {
            block.rep = classes[m].rep;
            block.pos = classes[m].pos;
          }
          block.members.insert(block.members.end(), classes[m].members.begin(),
                               classes[m].members.end());
        }
        merged.push_back(std::move(block));
        b0 = c + 1;
      }
      classes = std::move(merged);
    }
    if (mode == PlusMode::kernel) {
      split_nonpositive();
    }
    record(k + 1);
  }
  return path;
}

bool stays_positive(double x0, std::span<const double> w_plus) {
  double x = to_lattice(x0);
  if (!(x > 0.0)) return false;
  for (double dw : w_plus) {
    x += dw;
    if (!(x > 0.0)) return false;
  }
  return true;
}

KernelEstimate estimate_kernel_plus(double x0, const TimeGrid& window,
                                    std::span<const double> w_plus, std::size_t M,
                                    std::uint64_t inner_seed, std::uint64_t w_plus_seed,
                                    std::size_t threads) {
  if (M < 1) throw std::invalid_argument("estimate_kernel_plus: M must be at least 1");
  if (w_plus.size() != window.n_steps) {
    throw std::invalid_argument("estimate_kernel_plus: W+ length differs from the window");
  }
  KernelEstimate est;
  est.x0 = x0;
  est.s = window.t_start;
  est.t = window.t_end();
  est.w_plus_seed = w_plus_seed;
  est.inner_seed = inner_seed;
  est.support.resize(M);
  est.weights.assign(M, 1.0 / static_cast<double>(M));
  parallel_for(M, threads, [&](std::size_t m) {
    std::vector<double> wm(window.n_steps);
    IncrementStream(mix_seed(inner_seed, m), StreamLabel::minus(), window.dt).fill(wm);
    est.support[m] = terminal_one_point_pm(x0, w_plus, wm);
  });
  return est;
}

double kernel_apply(const KernelEstimate& est, const std::function<double(double)>& f) {
  std::vector<double> terms(est.support.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double v = f(est.support[i]);
    if (!std::isfinite(v)) throw std::domain_error("kernel_apply: f is not finite on the support");
    terms[i] = est.weights[i] * v;
  }
  return pairwise_sum(terms);
}

double kernel_apply_squared(const KernelEstimate& est, const std::function<double(double)>& f) {
  const std::size_t m = est.support.size();
  if (m < 2) throw std::invalid_argument("kernel_apply_squared: need at least two support points");
  std::vector<double> v(m), v2(m);
  for (std::size_t i = 0; i < m; ++i) {
    v[i] = f(est.support[i]);
    if (!std::isfinite(v[i])) throw std::domain_error("kernel_apply_squared: f not finite");
    v2[i] = v[i] * v[i];
  }
  const double s = pairwise_sum(v);
  const double s2 = pairwise_sum(v2);
  const double mm = static_cast<double>(m);
  return (s * s - s2) / (mm * (mm - 1.0));
}

TwoPointReport two_point_correlation_check(const TwoPointOptions& o,
                                           const std::function<double(double)>& f) {
  const TimeGrid grid = make_grid(0.0, o.horizon, o.dt).grid;
  std::vector<double> sq(o.outer);
  parallel_for(o.outer, o.threads, [&](std::size_t r) {
    const std::uint64_t seed = replica_seed(o.seed, r);
    std::vector<double> wp(grid.n_steps);
    IncrementStream(seed, StreamLabel::plus(), grid.dt).fill(wp);
    const KernelEstimate est = estimate_kernel_plus(o.x, grid, wp, o.inner, mix_seed(seed, 7), seed);
    sq[r] = kernel_apply_squared(est, f);
  });
  std::vector<double> pair(o.two_point_replicas);
  const auto labels = plus_labels(2);
  const double start[2] = {o.x, o.x};
  parallel_for(o.two_point_replicas, o.threads, [&](std::size_t r) {
    const NoiseBundle bundle = sample_bundle(grid, labels, replica_seed(o.seed ^ 0x2b, r));
    NPointOptions opt;
    opt.record_pairs = false;
    const PlusNPointPath p = simulate_n_point_plus(start, bundle, PlusMode::kernel, opt);
    pair[r] = f(p.position(0, grid.n_steps)) * f(p.position(1, grid.n_steps));
  });
  TwoPointReport rep;
  rep.squared_kernel = summarize(sq);
  rep.two_point = summarize(pair);
  rep.difference = rep.squared_kernel.mean - rep.two_point.mean;
  rep.combined_stderr = std::hypot(rep.squared_kernel.std_error, rep.two_point.std_error);
  rep.pass = std::abs(rep.difference) <= 3.0 * rep.combined_stderr ||
             (rep.combined_stderr == 0.0 && rep.difference == 0.0);
  return rep;
}

}  // namespace brownflow
