// SPDX-License-Identifier: Apache-2.0
#include "brownflow/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

#include "brownflow/stats.hpp"

namespace brownflow {

FunctionGrid::FunctionGrid(double x_min, double h, std::vector<double> values)
    : x_min_(x_min), h_(h), values_(std::move(values)) {
  if (!(h > 0.0) || !std::isfinite(x_min)) throw std::invalid_argument("FunctionGrid: bad nodes");
  if (values_.size() < 2) throw std::invalid_argument("FunctionGrid: need at least two nodes");
}

FunctionGrid FunctionGrid::sample(const std::function<double(double)>& f, double x_min,
                                  double x_max, std::size_t n_nodes) {
  if (!(x_max > x_min) || n_nodes < 2) throw std::invalid_argument("FunctionGrid: bad range");
  const double h = (x_max - x_min) / static_cast<double>(n_nodes - 1);
  std::vector<double> v(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) v[i] = f(x_min + h * static_cast<double>(i));
  return FunctionGrid(x_min, h, std::move(v));
}

FunctionGrid FunctionGrid::sample_like(const std::function<double(double)>& f,
                                       const FunctionGrid& like) {
  std::vector<double> v(like.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(like.node(i));
  return FunctionGrid(like.x_min(), like.spacing(), std::move(v));
}

double FunctionGrid::operator()(double x) const {
  const double r = (x - x_min_) / h_;
  if (r <= 0.0) {
    if (r < 0.0) clamped_ = true;
    return values_.front();
  }
  const double last = static_cast<double>(values_.size() - 1);
  if (r >= last) {
    if (r > last) clamped_ = true;
    return values_.back();
  }
  const auto i = static_cast<std::size_t>(r);
  const double w = r - static_cast<double>(i);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

namespace {

// Phi((m+1) c) - Phi(m c) for m in [-n, n), without cancellation.
struct KernelTable {
  std::ptrdiff_t n;
  std::vector<double> dphi;  // Phi mass of cell m
  std::vector<double> pdf;   // phi(m c), m in [-n, n]
  std::vector<double> cdf;   // Phi(m c), m in [-n, n]

  KernelTable(std::ptrdiff_t span, double c) : n(span) {
    pdf.resize(2 * n + 1);
    cdf.resize(2 * n + 1);
    dphi.resize(2 * n);
    for (std::ptrdiff_t m = -n; m <= n; ++m) {
      const double z = static_cast<double>(m) * c;
      pdf[m + n] = normal_pdf(z);
      cdf[m + n] = normal_cdf(z);
    }
    for (std::ptrdiff_t m = -n; m < n; ++m) {
      const double a = static_cast<double>(m) * c;
      const double b = a + c;
      // upper-tail difference for positive cells
      dphi[m + n] = a >= 0.0 ? 0.5 * (std::erfc(a / std::sqrt(2.0)) - std::erfc(b / std::sqrt(2.0)))
                             : normal_cdf(b) - normal_cdf(a);
    }
  }
  double cell(std::ptrdiff_t m) const { return dphi[m + n]; }
  double phi(std::ptrdiff_t m) const { return pdf[m + n]; }
  double Phi(std::ptrdiff_t m) const { return cdf[m + n]; }
};

}  // namespace

FunctionGrid heat_apply(const FunctionGrid& f, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("heat_apply: tau < 0");
  if (tau == 0.0) return f;
  const auto v = f.values();
  const auto n = static_cast<std::ptrdiff_t>(v.size());
  const double h = f.spacing();
  const double sigma = std::sqrt(tau);
  const KernelTable k(n, h / sigma);
  const auto cut = static_cast<std::ptrdiff_t>(std::ceil(12.0 * sigma / h)) + 1;
  std::vector<double> out(v.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = v[0] * k.Phi(-i) + v[n - 1] * (1.0 - k.Phi(n - 1 - i));
    const std::ptrdiff_t j0 = std::max<std::ptrdiff_t>(0, i - cut);
    const std::ptrdiff_t j1 = std::min<std::ptrdiff_t>(n - 1, i + cut);
    for (std::ptrdiff_t j = j0; j < j1; ++j) {
      const std::ptrdiff_t m = j - i;
      const double df = v[j + 1] - v[j];
      acc += (v[j] - df * static_cast<double>(m)) * k.cell(m) +
             df * (sigma / h) * (k.phi(m) - k.phi(m + 1));
    }
    out[i] = acc;
  }
  return FunctionGrid(f.x_min(), h, std::move(out));
}

FunctionGrid heat_derivative(const FunctionGrid& f, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::domain_error("heat_derivative: tau must be positive");
  }
  const auto v = f.values();
  const auto n = static_cast<std::ptrdiff_t>(v.size());
  const double h = f.spacing();
  const double sigma = std::sqrt(tau);
  const KernelTable k(n, h / sigma);
  const auto cut = static_cast<std::ptrdiff_t>(std::ceil(12.0 * sigma / h)) + 1;
  std::vector<double> out(v.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const std::ptrdiff_t j0 = std::max<std::ptrdiff_t>(0, i - cut);
    const std::ptrdiff_t j1 = std::min<std::ptrdiff_t>(n - 1, i + cut);
    for (std::ptrdiff_t j = j0; j < j1; ++j) acc += (v[j + 1] - v[j]) / h * k.cell(j - i);
    out[i] = acc;
  }
  return FunctionGrid(f.x_min(), h, std::move(out));
}

double ChaosStack::value(std::size_t level, double x) const {
  if (level > n_max) throw std::out_of_range("ChaosStack: level exceeds n_max");
  return levels[level](x);
}

double ChaosStack::sum(double x) const {
  double s = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) s += levels[n](x);
  return s;
}

namespace {

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// Planning is not thread-safe in FFTW; execution with fresh arrays is.
Plans plans_for(std::size_t len) {
  static std::mutex mu;
  static std::map<std::size_t, Plans> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(len);
  if (it != cache.end()) return it->second;
  double* in = fftw_alloc_real(len);
  fftw_complex* out = fftw_alloc_complex(len / 2 + 1);
  Plans p;
  p.r2c = fftw_plan_dft_r2c_1d(static_cast<int>(len), in, out, FFTW_ESTIMATE);
  p.c2r = fftw_plan_dft_c2r_1d(static_cast<int>(len), out, in, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  if (!p.r2c || !p.c2r) throw std::runtime_error("FFTW planning failed");
  cache.emplace(len, p);
  return p;
}

template <class T>
struct FftwBuffer {
  T* ptr;
  explicit FftwBuffer(std::size_t n) : ptr(static_cast<T*>(fftw_malloc(sizeof(T) * n))) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

using cplx = std::complex<double>;

}  // namespace

ChaosStack build_chaos_stack(const FunctionGrid& f, const TimeGrid& window, ChaosNoise noise,
                             const ChaosSettings& settings) {
  const std::size_t steps = window.n_steps;
  if (noise.w_plus.size() != steps) {
    throw std::invalid_argument("build_chaos_stack: W+ length differs from the window");
  }
  const bool pm = settings.cov == CovarianceKind::c_pm;
  if (pm && noise.w_minus.size() != steps) {
    throw std::invalid_argument("build_chaos_stack: W- length differs from the window");
  }
  // periodic grid: the last node is identified with the first
  const std::size_t len = f.size() - 1;
  if (len < 4 || len % 2 != 0) {
    throw std::invalid_argument("build_chaos_stack: need an odd node count of at least 5");
  }
  const std::size_t nc = len / 2 + 1;
  const std::size_t levels = settings.n_max + 1;
  const Plans plans = plans_for(len);
  const double period = f.spacing() * static_cast<double>(len);
  constexpr double kTwoPi = 6.283185307179586477;

  std::vector<double> heat(nc);
  std::vector<cplx> deriv(nc);
  for (std::size_t k = 0; k < nc; ++k) {
    const double xi = kTwoPi * static_cast<double>(k) / period;
    heat[k] = std::exp(-0.5 * xi * xi * window.dt);
    // drop the unpaired Nyquist mode from the derivative
    deriv[k] = (k == len / 2) ? cplx(0.0) : cplx(0.0, xi / static_cast<double>(len));
  }
  std::vector<double> plus_mask(len), minus_mask(len);
  for (std::size_t i = 0; i < len; ++i) {
    plus_mask[i] = e_plus(f.node(i));
    minus_mask[i] = e_minus(f.node(i));
  }

  FftwBuffer<double> real(len);
  FftwBuffer<fftw_complex> freq(nc);
  std::vector<std::vector<cplx>> F(levels, std::vector<cplx>(nc, cplx(0.0)));
  std::copy(f.values().begin(), f.values().begin() + len, real.ptr);
  fftw_execute_dft_r2c(plans.r2c, real.ptr, freq.ptr);
  for (std::size_t k = 0; k < nc; ++k) F[0][k] = cplx(freq.ptr[k][0], freq.ptr[k][1]);

  for (std::size_t j = steps; j-- > 0;) {
    for (auto& level : F) {
      for (std::size_t k = 0; k < nc; ++k) level[k] *= heat[k];
    }
    const double dwp = noise.w_plus[j];
    const double dwm = pm ? noise.w_minus[j] : 0.0;
    for (std::size_t n = settings.n_max; n >= 1; --n) {
      const auto& q = F[n - 1];
      for (std::size_t k = 0; k < nc; ++k) {
        const cplx d = q[k] * deriv[k];
        freq.ptr[k][0] = d.real();
        freq.ptr[k][1] = d.imag();
      }
      fftw_execute_dft_c2r(plans.c2r, freq.ptr, real.ptr);
      for (std::size_t i = 0; i < len; ++i) {
        real.ptr[i] *= plus_mask[i] * dwp + minus_mask[i] * dwm;
      }
      fftw_execute_dft_r2c(plans.r2c, real.ptr, freq.ptr);
      auto& target = F[n];
      for (std::size_t k = 0; k < nc; ++k) target[k] += cplx(freq.ptr[k][0], freq.ptr[k][1]);
    }
  }

  ChaosStack stack;
  stack.window = window;
  stack.n_max = settings.n_max;
  for (std::size_t n = 0; n < levels; ++n) {
    for (std::size_t k = 0; k < nc; ++k) {
      freq.ptr[k][0] = F[n][k].real() / static_cast<double>(len);
      freq.ptr[k][1] = F[n][k].imag() / static_cast<double>(len);
    }
    fftw_execute_dft_c2r(plans.c2r, freq.ptr, real.ptr);
    std::vector<double> v(len + 1);
    std::copy(real.ptr, real.ptr + len, v.begin());
    v[len] = v[0];
    stack.levels.emplace_back(f.x_min(), f.spacing(), std::move(v));
  }
  return stack;
}

double chaos_term(const FunctionGrid& f, const TimeGrid& window, std::size_t level,
                  ChaosNoise noise, const ChaosSettings& settings, double x) {
  if (level > settings.n_max) throw std::out_of_range("chaos_term: level exceeds n_max");
  return build_chaos_stack(f, window, noise, settings).value(level, x);
}

ChaosSum chaos_sum(const FunctionGrid& f, const TimeGrid& window, ChaosNoise noise,
                   const ChaosSettings& settings, double x) {
  const ChaosStack stack = build_chaos_stack(f, window, noise, settings);
  ChaosSum out;
  for (std::size_t n = 0; n <= settings.n_max; ++n) out.per_level.push_back(stack.value(n, x));
  out.value = pairwise_sum(out.per_level);
  return out;
}

FunctionGrid default_chaos_grid(const std::function<double(double)>& f, double t_total) {
  if (!(t_total > 0.0)) throw std::invalid_argument("default_chaos_grid: t must be positive");
  const double half = 8.0 * std::sqrt(t_total);
  return FunctionGrid::sample(f, -half, half, (1u << 12) + 1);
}

std::vector<double> coarsen_increments(std::span<const double> w, std::size_t factor) {
  if (factor == 0 || w.size() % factor != 0) {
    throw std::invalid_argument("coarsen_increments: length not divisible by factor");
  }
  std::vector<double> out(w.size() / factor, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) out[i / factor] += w[i];
  return out;
}

}  // namespace brownflow
