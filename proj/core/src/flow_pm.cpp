// SPDX-License-Identifier: Apache-2.0
#include "brownflow/flow_pm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace brownflow {

std::size_t NPointPath::pair_index(std::size_t i, std::size_t j) const {
  if (i == j || i >= n_particles || j >= n_particles) {
    throw std::out_of_range("NPointPath: bad particle pair");
  }
  if (i > j) std::swap(i, j);
  // row-major strict upper triangle
  return i * n_particles - i * (i + 1) / 2 + (j - i - 1);
}

double NPointPath::coalescence_time(std::size_t i, std::size_t j) const {
  if (coalescence_times.empty()) {
    throw std::logic_error("NPointPath: pair times were not recorded");
  }
  return coalescence_times[pair_index(i, j)];
}

std::vector<double> NPointPath::terminal() const {
  std::vector<double> out(n_particles);
  for (std::size_t p = 0; p < n_particles; ++p) out[p] = position(p, grid.n_steps);
  return out;
}

double merge_tolerance(std::span<const double> x0) {
  double scale = 1.0;
  for (double x : x0) scale = std::max(scale, std::abs(x));
  return 1e-12 * scale;
}

double step_pm(double x, double dw_plus, double dw_minus) {
  if (!std::isfinite(x) || !std::isfinite(dw_plus) || !std::isfinite(dw_minus)) {
    throw std::invalid_argument("step_pm: non-finite input");
  }
  return x > 0.0 ? x + dw_plus : x + dw_minus;
}

namespace {

void check_start(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite initial position");
  if (std::abs(x) >= kLatticeRange) throw std::range_error("initial position out of range");
}

void check_range(double x) {
  if (std::abs(x) >= kLatticeRange) {
    throw std::range_error("particle left the exact-arithmetic range");
  }
}

struct Window {
  std::size_t first = 0;
  std::size_t last = 0;
};

Window clip_window(const NoiseBundle& bundle, std::size_t first, std::size_t last) {
  const std::size_t n = bundle.grid().n_steps;
  last = std::min(last, n);
  if (first > last) throw std::invalid_argument("step window is empty or reversed");
  return {first, last};
}

// Classes kept in position order; each owns a contiguous particle range.
class PmCloud {
 public:
  PmCloud(std::span<const double> x0, double tol) : tol_(tol) {
    for (std::size_t p = 0; p < x0.size(); ++p) {
      const double x = to_lattice(x0[p]);
      if (!pos_.empty() && x - pos_.back() <= tol_) {
        end_.back() = static_cast<std::uint32_t>(p + 1);
        continue;
      }
      pos_.push_back(x);
      begin_.push_back(static_cast<std::uint32_t>(p));
      end_.push_back(static_cast<std::uint32_t>(p + 1));
    }
  }

  template <class OnMerge>
  void step(double dwp, double dwm, OnMerge&& on_merge) {
    const std::size_t n = pos_.size();
    for (std::size_t c = 0; c < n; ++c) {
      pos_[c] += pos_[c] > 0.0 ? dwp : dwm;
    }
    std::size_t w = 0;
    for (std::size_t c = 1; c < n; ++c) {
      if (pos_[c] - pos_[w] <= tol_) {
        on_merge(begin_[w], end_[w], begin_[c], end_[c]);
        end_[w] = end_[c];
      } else {
        ++w;
        pos_[w] = pos_[c];
        begin_[w] = begin_[c];
        end_[w] = end_[c];
      }
    }
    if (n > 0) {
      pos_.resize(w + 1);
      begin_.resize(w + 1);
      end_.resize(w + 1);
      check_range(pos_.front());
      check_range(pos_.back());
    }
  }

  std::size_t size() const { return pos_.size(); }
  double pos(std::size_t c) const { return pos_[c]; }
  std::uint32_t begin(std::size_t c) const { return begin_[c]; }
  std::uint32_t end(std::size_t c) const { return end_[c]; }

 private:
  double tol_;
  std::vector<double> pos_;
  std::vector<std::uint32_t> begin_;
  std::vector<std::uint32_t> end_;
};

void require_pm_streams(const NoiseBundle& bundle) {
  if (!bundle.has(StreamLabel::plus()) || !bundle.has(StreamLabel::minus())) {
    throw std::invalid_argument("bundle lacks W_PLUS or W_MINUS");
  }
}

void require_sorted(std::span<const double> x0) {
  for (double x : x0) check_start(x);
  if (!std::is_sorted(x0.begin(), x0.end())) {
    throw std::invalid_argument("initial positions must be sorted");
  }
}

}  // namespace

std::vector<double> simulate_one_point_pm(double x0, const NoiseBundle& bundle) {
  require_pm_streams(bundle);
  check_start(x0);
  const auto wp = bundle.increments(StreamLabel::plus());
  const auto wm = bundle.increments(StreamLabel::minus());
  std::vector<double> path(wp.size() + 1);
  double x = to_lattice(x0);
  path[0] = x;
  for (std::size_t k = 0; k < wp.size(); ++k) {
    x = x > 0.0 ? x + wp[k] : x + wm[k];
    path[k + 1] = x;
  }
  check_range(x);
  return path;
}

double terminal_one_point_pm(double x0, std::span<const double> dw_plus,
                             std::span<const double> dw_minus) {
  if (dw_plus.size() != dw_minus.size()) {
    throw std::invalid_argument("terminal_one_point_pm: stream lengths differ");
  }
  check_start(x0);
  double x = to_lattice(x0);
  for (std::size_t k = 0; k < dw_plus.size(); ++k) {
    x = x > 0.0 ? x + dw_plus[k] : x + dw_minus[k];
  }
  check_range(x);
  return x;
}

NPointPath simulate_n_point_pm(std::span<const double> x0, const NoiseBundle& bundle,
                               const NPointOptions& options) {
  require_pm_streams(bundle);
  require_sorted(x0);
  const Window win = clip_window(bundle, options.first_step, options.last_step);
  const auto wp = bundle.increments(StreamLabel::plus());
  const auto wm = bundle.increments(StreamLabel::minus());

  NPointPath path;
  path.grid = TimeGrid{bundle.grid().time_at(win.first), bundle.grid().dt, win.last - win.first};
  path.n_particles = x0.size();
  path.merge_tol = merge_tolerance(x0);
  const std::size_t ns = path.n_samples();
  path.positions.resize(path.n_particles * ns);
  path.classes.resize(path.n_particles * ns);
  if (options.record_pairs && path.n_particles > 1) {
    path.coalescence_times.assign(path.n_particles * (path.n_particles - 1) / 2, kNever);
  }

  PmCloud cloud(x0, path.merge_tol);
  auto record = [&](std::size_t k) {
    for (std::size_t c = 0; c < cloud.size(); ++c) {
      for (std::uint32_t p = cloud.begin(c); p < cloud.end(c); ++p) {
        path.positions[p * ns + k] = cloud.pos(c);
        path.classes[p * ns + k] = cloud.begin(c);
      }
    }
  };
  auto mark_pairs = [&](double t, std::uint32_t a0, std::uint32_t a1, std::uint32_t b0,
                        std::uint32_t b1) {
    if (path.coalescence_times.empty()) return;
    for (std::uint32_t i = a0; i < a1; ++i) {
      for (std::uint32_t j = b0; j < b1; ++j) path.coalescence_times[path.pair_index(i, j)] = t;
    }
  };
  // initial duplicates
  for (std::size_t c = 0; c < cloud.size(); ++c) {
    for (std::uint32_t i = cloud.begin(c); i < cloud.end(c); ++i) {
      mark_pairs(path.grid.t_start, i, i + 1, i + 1, cloud.end(c));
    }
  }
  record(0);
  for (std::size_t k = 0; k < path.grid.n_steps; ++k) {
    const double t = path.grid.time_at(k + 1);
    cloud.step(wp[win.first + k], wm[win.first + k],
               [&](std::uint32_t a0, std::uint32_t a1, std::uint32_t b0, std::uint32_t b1) {
                 mark_pairs(t, a0, a1, b0, b1);
               });
    record(k + 1);
  }
  return path;
}

FlowMapSample flow_map_pm(std::span<const double> x_grid, const NoiseBundle& bundle,
                          std::size_t first_step, std::size_t last_step) {
  require_pm_streams(bundle);
  require_sorted(x_grid);
  const Window win = clip_window(bundle, first_step, last_step);
  const auto wp = bundle.increments(StreamLabel::plus());
  const auto wm = bundle.increments(StreamLabel::minus());

  PmCloud cloud(x_grid, merge_tolerance(x_grid));
  for (std::size_t k = win.first; k < win.last; ++k) {
    cloud.step(wp[k], wm[k], [](auto...) {});
  }
  FlowMapSample out;
  out.x_grid.assign(x_grid.begin(), x_grid.end());
  out.images.resize(x_grid.size());
  for (std::size_t c = 0; c < cloud.size(); ++c) {
    for (std::uint32_t p = cloud.begin(c); p < cloud.end(c); ++p) out.images[p] = cloud.pos(c);
  }
  out.noise_ref = bundle.seed();
  return out;
}

FlowMapSample flow_map_pm(std::span<const double> x_grid, const NoiseBundle& bundle) {
  return flow_map_pm(x_grid, bundle, 0, bundle.grid().n_steps);
}

NoiseRecovery recover_noise_pm(const FlowMapSample& sample) {
  const auto& x = sample.x_grid;
  const auto& img = sample.images;
  if (x.size() != img.size()) throw std::invalid_argument("recover_noise_pm: size mismatch");
  if (x.size() < 4 || !(x.front() < 0.0) || !(x.back() > 0.0)) {
    throw std::invalid_argument("recover_noise_pm: need two grid points on each side of 0");
  }
  const std::size_t n = x.size();
  // the flow acts on lattice-rounded starting points
  auto disp = [&](std::size_t i) { return img[i] - to_lattice(x[i]); };
  if (std::abs(disp(n - 1) - disp(n - 2)) > 1e-12 || std::abs(disp(0) - disp(1)) > 1e-12) {
    throw std::runtime_error("recover_noise_pm: grid too narrow, displacements not converged");
  }
  return {disp(n - 1), disp(0)};
}

namespace {

std::size_t step_of(const TimeGrid& grid, double time, const char* name) {
  const double k = std::round((time - grid.t_start) / grid.dt);
  if (k < 0.0 || k > static_cast<double>(grid.n_steps) ||
      std::abs(grid.time_at(static_cast<std::size_t>(k)) - time) > 1e-9 * grid.dt) {
    throw std::invalid_argument(std::string("flow_property_check: ") + name +
                                " is not a grid time");
  }
  return static_cast<std::size_t>(k);
}

}  // namespace

FlowPropertyReport flow_property_check(const NoiseBundle& bundle, double s, double u, double t,
                                       std::span<const double> x_grid) {
  if (!(s <= u && u <= t)) throw std::invalid_argument("flow_property_check: need s <= u <= t");
  const std::size_t ks = step_of(bundle.grid(), s, "s");
  const std::size_t ku = step_of(bundle.grid(), u, "u");
  const std::size_t kt = step_of(bundle.grid(), t, "t");

  const FlowMapSample direct = flow_map_pm(x_grid, bundle, ks, kt);
  const FlowMapSample first = flow_map_pm(x_grid, bundle, ks, ku);
  const FlowMapSample second = flow_map_pm(first.images, bundle, ku, kt);

  FlowPropertyReport report;
  report.s = s;
  report.u = u;
  report.t = t;
  report.n_points = x_grid.size();
  report.merge_tol = merge_tolerance(x_grid);
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    report.max_abs_deviation =
        std::max(report.max_abs_deviation, std::abs(direct.images[i] - second.images[i]));
  }
  report.within_tol = report.max_abs_deviation <= report.merge_tol;
  return report;
}

std::vector<ZeroEpoch> zero_epochs(const NPointPath& path) {
  std::vector<ZeroEpoch> epochs;
  auto below = [&](std::size_t k) {
    std::size_t count = 0;
    for (std::size_t p = 0; p < path.n_particles; ++p) count += path.position(p, k) <= 0.0;
    return count;
  };
  std::size_t prev = below(0);
  for (std::size_t k = 1; k < path.n_samples(); ++k) {
    const std::size_t now = below(k);
    if (now != prev) epochs.push_back({k, now});
    prev = now;
  }
  return epochs;
}

}  // namespace brownflow
