// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <brownflow/chaos.hpp>
#include <brownflow/parallel.hpp>
#include <brownflow/stats.hpp>

namespace bf = brownflow;

namespace {

double gauss_pdf(double x, double var) {
  return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * M_PI * var);
}

double step_mid(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? 0.0 : 0.5); }

double bump(double x) { return std::exp(-0.5 * x * x); }

// (P_s f)'(y) for the unit bump
double heat_bump_derivative(double y, double s) {
  return -y * std::pow(1.0 + s, -1.5) * std::exp(-0.5 * y * y / (1.0 + s));
}

// P_u [ (P_{t-u} f)' 1{>0} ](x)
double smoothed_integrand(double x, double u, double t) {
  const double s = t - u;
  if (u == 0.0) return x > 0.0 ? heat_bump_derivative(x, s) : 0.0;
  auto g = [&](double y) { return heat_bump_derivative(y, s) * gauss_pdf(y - x, u); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      g, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-12);
}

// P_u [ ((P_{t-u} f)' 1{>0})^2 ](x)
double smoothed_square(double x, double u, double t) {
  const double s = t - u;
  if (u == 0.0) return x > 0.0 ? std::pow(heat_bump_derivative(x, s), 2) : 0.0;
  auto g = [&](double y) { return std::pow(heat_bump_derivative(y, s), 2) * gauss_pdf(y - x, u); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      g, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-12);
}

}  // namespace

TEST(FunctionGrid, InterpolationAndClamp) {
  const bf::FunctionGrid g = bf::FunctionGrid::sample([](double x) { return 2 * x; }, -1, 1, 5);
  EXPECT_DOUBLE_EQ(g(0.25), 0.5);
  EXPECT_FALSE(g.clamped());
  EXPECT_EQ(g(1.0), 2.0);
  EXPECT_FALSE(g.clamped());
  EXPECT_EQ(g(3.0), 2.0);
  EXPECT_TRUE(g.clamped());
  g.clear_clamped();
  EXPECT_EQ(g(-7.0), -2.0);
  EXPECT_TRUE(g.clamped());
  EXPECT_THROW(bf::FunctionGrid(0.0, 0.0, {1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(bf::FunctionGrid(0.0, 1.0, {1.0}), std::invalid_argument);
  EXPECT_THROW(bf::FunctionGrid::sample(bump, 1, 0, 5), std::invalid_argument);
}

TEST(HeatApply, IndicatorIsHalfAtZero) {
  const bf::FunctionGrid f = bf::FunctionGrid::sample(step_mid, -10, 10, 2001);
  for (double tau : {0.01, 0.5, 2.0}) {
    const bf::FunctionGrid p = bf::heat_apply(f, tau);
    EXPECT_NEAR(p(0.0), 0.5, 1e-12) << tau;
  }
}

TEST(HeatApply, LinearUnchangedInside) {
  const bf::FunctionGrid f = bf::FunctionGrid::sample([](double x) { return x; }, -50, 50, 2001);
  const bf::FunctionGrid p = bf::heat_apply(f, 1.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f.node(i)) < 30) EXPECT_NEAR(p.values()[i], f.node(i), 1e-8);
  }
}

TEST(HeatApply, GaussianDensity) {
  const bf::FunctionGrid f =
      bf::FunctionGrid::sample([](double x) { return gauss_pdf(x, 0.25); }, -8, 8, 8001);
  const bf::FunctionGrid p = bf::heat_apply(f, 0.5);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    worst = std::max(worst, std::abs(p.values()[i] - gauss_pdf(f.node(i), 0.75)));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(HeatApply, SemigroupAndZero) {
  const bf::FunctionGrid f =
      bf::FunctionGrid::sample([](double x) { return gauss_pdf(x, 0.25); }, -8, 8, 8001);
  const bf::FunctionGrid two = bf::heat_apply(bf::heat_apply(f, 0.2), 0.3);
  const bf::FunctionGrid one = bf::heat_apply(f, 0.5);
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_NEAR(two.values()[i], one.values()[i], 2e-6);
  }
  const bf::FunctionGrid same = bf::heat_apply(f, 0.0);
  EXPECT_TRUE(std::equal(same.values().begin(), same.values().end(), f.values().begin()));
  EXPECT_THROW(bf::heat_apply(f, -0.1), std::invalid_argument);
}

TEST(HeatDerivative, IndicatorGivesDensity) {
  const bf::FunctionGrid f = bf::FunctionGrid::sample(step_mid, -8, 8, 8001);
  const double tau = 0.3;
  const bf::FunctionGrid d = bf::heat_derivative(f, tau);
  // the interpolant ramps from 0 to 1 across [-h, h]
  const double h = f.spacing(), sd = std::sqrt(tau);
  for (std::size_t i : {std::size_t{4000}, std::size_t{4250}, std::size_t{3500}}) {
    const double x = f.node(i);
    const double ramp = (bf::normal_cdf((x + h) / sd) - bf::normal_cdf((x - h) / sd)) / (2 * h);
    EXPECT_NEAR(d.values()[i], ramp, 1e-9) << x;
    EXPECT_NEAR(d.values()[i], gauss_pdf(x, tau), 2e-6) << x;
  }
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < d.size(); ++i) {
    integral += 0.5 * (d.values()[i] + d.values()[i + 1]) * d.spacing();
  }
  EXPECT_NEAR(integral, f.values().back() - f.values().front(), 1e-6);
}

TEST(HeatDerivative, ConstantAndErrors) {
  const bf::FunctionGrid f = bf::FunctionGrid::sample([](double) { return 3.0; }, -1, 1, 101);
  const bf::FunctionGrid d = bf::heat_derivative(f, 0.1);
  for (double v : d.values()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(bf::heat_derivative(f, 0.0), std::domain_error);
}

TEST(ChaosStack, LevelZeroIsHeatValue) {
  const bf::TimeGrid g = bf::make_grid(0, 1, 0.01).grid;
  const bf::FunctionGrid f = bf::default_chaos_grid(bump, 1.0);
  std::vector<double> wp(g.n_steps);
  bf::IncrementStream(3, bf::StreamLabel::plus(), g.dt).fill(wp);
  bf::ChaosSettings s;
  s.n_max = 0;
  const double expected = std::exp(-0.0625) / std::sqrt(2.0);
  const bf::ChaosSum sum = bf::chaos_sum(f, g, bf::ChaosNoise{wp, {}}, s, 0.5);
  EXPECT_NEAR(sum.value, expected, 1e-9);
  std::vector<double> other(g.n_steps, 0.3);
  EXPECT_NEAR(bf::chaos_term(f, g, 0, bf::ChaosNoise{other, {}}, s, 0.5), sum.value, 1e-13);
}

TEST(ChaosStack, Errors) {
  const bf::TimeGrid g = bf::make_grid(0, 1, 0.1).grid;
  const bf::FunctionGrid f = bf::default_chaos_grid(bump, 1.0);
  std::vector<double> wp(g.n_steps, 0.0), wrong(3, 0.0);
  bf::ChaosSettings s;
  s.n_max = 2;
  EXPECT_THROW(bf::chaos_term(f, g, 3, bf::ChaosNoise{wp, {}}, s, 0.0), std::out_of_range);
  EXPECT_THROW(bf::build_chaos_stack(f, g, bf::ChaosNoise{wrong, {}}, s), std::invalid_argument);
  s.cov = bf::CovarianceKind::c_pm;
  EXPECT_THROW(bf::build_chaos_stack(f, g, bf::ChaosNoise{wp, wrong}, s), std::invalid_argument);
  s.cov = bf::CovarianceKind::c_plus;
  const bf::FunctionGrid even = bf::FunctionGrid::sample(bump, -8, 8, 64);
  EXPECT_THROW(bf::build_chaos_stack(even, g, bf::ChaosNoise{wp, {}}, s), std::invalid_argument);
  const bf::ChaosStack st = bf::build_chaos_stack(f, g, bf::ChaosNoise{wp, {}}, s);
  EXPECT_THROW(st.value(3, 0.0), std::out_of_range);
  EXPECT_THROW(bf::default_chaos_grid(bump, 0.0), std::invalid_argument);
}

TEST(ChaosStack, ZeroNoiseKillsHigherLevels) {
  const bf::TimeGrid g = bf::make_grid(0, 1, 0.05).grid;
  const bf::FunctionGrid f = bf::default_chaos_grid(bump, 1.0);
  std::vector<double> zero(g.n_steps, 0.0);
  bf::ChaosSettings s;
  s.n_max = 3;
  s.cov = bf::CovarianceKind::c_pm;
  const bf::ChaosStack st = bf::build_chaos_stack(f, g, bf::ChaosNoise{zero, zero}, s);
  for (std::size_t n = 1; n <= 3; ++n) EXPECT_NEAR(st.value(n, 0.2), 0.0, 1e-15);
}

TEST(CoarsenIncrements, SumsGroups) {
  const std::vector<double> w{1, 2, 3, 4, 5, 6};
  EXPECT_EQ(bf::coarsen_increments(w, 3), (std::vector<double>{6, 15}));
  EXPECT_THROW(bf::coarsen_increments(w, 4), std::invalid_argument);
  EXPECT_THROW(bf::coarsen_increments(w, 0), std::invalid_argument);
}

// First level statistics against the Ito isometry, evaluated with the
// same left-point time discretization the sweep uses.
TEST(ChaosStatistics, FirstLevelMomentsAndOrthogonality) {
  const double t = 1.0, dt = 0.02, x = 0.0;
  const bf::TimeGrid g = bf::make_grid(0, t, dt).grid;
  const bf::FunctionGrid f = bf::FunctionGrid::sample(bump, -12, 12, 2049);
  bf::ChaosSettings s;
  s.n_max = 2;
  const std::size_t n = 5000;
  std::vector<double> j0(n), j1(n), j2(n), sum(n);
  bf::parallel_for(n, 0, [&](std::size_t r) {
    std::vector<double> wp(g.n_steps);
    bf::IncrementStream(bf::replica_seed(61, r), bf::StreamLabel::plus(), dt).fill(wp);
    const bf::ChaosStack st = bf::build_chaos_stack(f, g, bf::ChaosNoise{wp, {}}, s);
    j0[r] = st.value(0, x);
    j1[r] = st.value(1, x);
    j2[r] = st.value(2, x);
    sum[r] = st.sum(x);
  });
  const bf::MCSummary m1 = bf::summarize(j1);
  EXPECT_LE(std::abs(m1.mean), 3 * m1.std_error);
  const bf::MCSummary ms = bf::summarize(sum);
  EXPECT_LE(std::abs(ms.mean - 1.0 / std::sqrt(2.0)), 3 * ms.std_error);

  double isometry = 0.0, jensen = 0.0;
  for (std::size_t k = 0; k < g.n_steps; ++k) {
    const double u = g.time_at(k);
    isometry += std::pow(smoothed_integrand(x, u, t), 2) * dt;
    jensen += smoothed_square(x, u, t) * dt;
  }
  std::vector<double> sq(n), cross(n);
  for (std::size_t r = 0; r < n; ++r) {
    sq[r] = j1[r] * j1[r];
    cross[r] = (j1[r] - m1.mean) * j2[r];
  }
  const bf::MCSummary v1 = bf::summarize(sq);
  EXPECT_LE(std::abs(v1.mean - isometry), 3 * v1.std_error) << v1.mean << " vs " << isometry;
  EXPECT_LE(v1.mean, jensen + 3 * v1.std_error);
  EXPECT_LT(isometry, jensen);
  const bf::MCSummary c12 = bf::summarize(cross);
  EXPECT_LE(std::abs(c12.mean), 4 * c12.std_error);
}
