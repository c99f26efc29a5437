// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <gtest/gtest.h>
#include <json.hpp>

#include <brownflow/flow_pm.hpp>
#include <brownflow/parallel.hpp>
#include <brownflow/verify.hpp>

namespace bf = brownflow;

namespace {

const bf::StreamLabel kPm[] = {bf::StreamLabel::plus(), bf::StreamLabel::minus()};

std::vector<double> normals(std::uint64_t seed, std::size_t n) {
  std::vector<double> v(n);
  bf::IncrementStream(seed, bf::StreamLabel::plus(), 1.0).fill(v);
  return v;
}

std::vector<bf::NPointPath> pm_paths(std::vector<double> x0, std::size_t n, double dt,
                                     std::uint64_t seed) {
  std::vector<bf::NPointPath> out(n);
  const bf::TimeGrid g = bf::make_grid(0, 1, dt).grid;
  bf::parallel_for(n, 0, [&](std::size_t r) {
    bf::NPointOptions o;
    o.record_pairs = false;
    out[r] = bf::simulate_n_point_pm(x0, bf::sample_bundle(g, kPm, bf::replica_seed(seed, r)), o);
  });
  return out;
}

const bf::TestFunction& find(const std::vector<bf::TestFunction>& lib, const std::string& name) {
  for (const auto& f : lib) {
    if (f.name == name) return f;
  }
  throw std::runtime_error("no function " + name);
}

}  // namespace

TEST(KsTest, CalibratedUnderTheNull) {
  int rejected = 0;
  const int trials = 400;
  for (int s = 0; s < trials; ++s) {
    const auto v = normals(1000 + s, 200);
    rejected += !bf::ks_test(v, bf::normal_cdf, 0.05).pass;
  }
  const double rate = static_cast<double>(rejected) / trials;
  EXPECT_GT(rate, 0.02);
  EXPECT_LT(rate, 0.09);
}

TEST(KsTest, ReportFieldsAndFailures) {
  const auto v = normals(5, 1000);
  const bf::TestReport r = bf::ks_test(v, bf::normal_cdf);
  EXPECT_EQ(r.n_replicas, 1000u);
  EXPECT_EQ(r.pass, r.value <= r.tolerance);
  EXPECT_NEAR(r.tolerance, 1.6276 / std::sqrt(1000.0), 2e-3);

  const std::vector<double> zeros(100, 0.0);
  EXPECT_FALSE(bf::ks_test(zeros, bf::normal_cdf).pass);
  EXPECT_NEAR(bf::ks_test(zeros, bf::normal_cdf).value, 0.5, 1e-12);

  EXPECT_THROW(bf::ks_test(std::vector<double>(49, 0.0), bf::normal_cdf), std::invalid_argument);
  EXPECT_THROW(bf::ks_test(v, bf::normal_cdf, 1.0), std::invalid_argument);
}

TEST(JsonLine, SingleLineWithNullForNonFinite) {
  bf::TestReport r;
  r.name = "x";
  r.value = 1.5;
  r.inputs = {{"a", 2.0}, {"b", std::numeric_limits<double>::infinity()}};
  const std::string line = bf::to_json_line(r);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j["name"], "x");
  EXPECT_EQ(j["inputs"]["a"], 2.0);
  EXPECT_TRUE(j["inputs"]["b"].is_null());
  EXPECT_EQ(j["seed_range"].size(), 2u);
}

TEST(RealizedCovariation, Examples) {
  const std::vector<double> a{0, 1, 2, 3}, b{0, 2, 4, 6}, c{0, -1, 0, -1};
  EXPECT_EQ(bf::realized_covariation(a, b), (std::vector<double>{0, 2, 4, 6}));
  EXPECT_EQ(bf::realized_covariation(a, c), (std::vector<double>{0, -1, 0, -1}));
  EXPECT_THROW(bf::realized_covariation(a, std::vector<double>{0, 1}), std::invalid_argument);
}

TEST(CovariationBySign, PassesForFlowAndFailsForIndependentPaths) {
  const double dt = 1e-4;
  const auto paths = pm_paths({-0.3, 0.4}, 5, dt, 3);
  for (const auto& p : paths) {
    std::vector<double> x, y;
    for (std::size_t k = 0; k < p.n_samples(); ++k) {
      x.push_back(p.position(0, k));
      y.push_back(p.position(1, k));
    }
    EXPECT_TRUE(bf::covariation_by_sign(x, y, dt, bf::CovarianceKind::c_pm).pass);
  }
  // two independent motions kept above zero should have covariance 1 there
  std::vector<double> x(10001, 5.0), y(10001, 6.0);
  const auto wx = normals(10, 10000), wy = normals(11, 10000);
  for (std::size_t k = 0; k < 10000; ++k) {
    x[k + 1] = x[k] + wx[k] * std::sqrt(dt);
    y[k + 1] = y[k] + wy[k] * std::sqrt(dt);
  }
  const bf::CovariationSplit s = bf::covariation_by_sign(x, y, dt, bf::CovarianceKind::c_pm);
  EXPECT_FALSE(s.pass);
  EXPECT_NEAR(s.time_same, 1.0, 1e-9);
  EXPECT_THROW(bf::covariation_by_sign(std::vector<double>{1}, std::vector<double>{1}, dt,
                                       bf::CovarianceKind::c_pm),
               std::invalid_argument);
}

TEST(TestFunctions, DerivativesMatchFiniteDifferences) {
  const std::vector<double> x{0.3, -0.2, 0.7};
  const double h = 1e-5;
  for (const auto& f : bf::test_function_library(3)) {
    std::vector<double> g(3), hess(9), gp(3), gm(3);
    f.gradient(x, g);
    f.hessian(x, hess);
    for (std::size_t i = 0; i < 3; ++i) {
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      EXPECT_NEAR(g[i], (f.value(xp) - f.value(xm)) / (2 * h), 1e-7) << f.name;
      f.gradient(xp, gp);
      f.gradient(xm, gm);
      for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(hess[j * 3 + i], (gp[j] - gm[j]) / (2 * h), 1e-7) << f.name;
      }
    }
  }
  EXPECT_THROW(bf::test_function_library(0), std::invalid_argument);
}

TEST(MartingaleResidual, CentredForTheRightGenerator) {
  const auto lib = bf::test_function_library(2);
  const auto paths = pm_paths({-0.3, 0.4}, 2000, 1e-3, 21);
  for (const char* name : {"linear", "product_first_last", "gaussian_bump"}) {
    const bf::MCSummary m =
        bf::martingale_residual(paths, find(lib, name), bf::CovarianceKind::c_pm);
    EXPECT_LE(std::abs(m.mean), 4 * m.std_error + 1e-12) << name;
  }
}

TEST(MartingaleResidual, NegativeControlDetectsWrongCovariance) {
  const auto lib = bf::test_function_library(2);
  const auto paths = pm_paths({1.0, 2.0}, 500, 1e-3, 22);
  const bf::MCSummary m =
      bf::martingale_residual(paths, find(lib, "product_first_last"), bf::zero_covariance());
  EXPECT_GT(std::abs(m.mean) / m.std_error, 3.0);
}

TEST(ExitProbability, MatchesRatio) {
  bf::ExitOptions o;
  o.seed = 8;
  // alpha must be large against sqrt(dt) for the ratio to be resolved
  const bf::TestReport r = bf::exit_probability_check(0.1, 0.2, 2000, o);
  EXPECT_TRUE(r.pass) << r.value << " tol " << r.tolerance << " cens "
                      << r.inputs.at("censored_fraction");
  EXPECT_EQ(r.inputs.at("expected"), 0.5);
  EXPECT_NEAR(r.tolerance, 3 * std::sqrt(0.25 / 2000), 1e-15);
  EXPECT_THROW(bf::exit_probability_check(0.01, 0.01, 10, o), std::invalid_argument);
  EXPECT_THROW(bf::exit_probability_check(0.0, 0.01, 10, o), std::invalid_argument);
  EXPECT_THROW(bf::exit_probability_check(0.001, 0.01, 0, o), std::invalid_argument);
}

TEST(CoalescenceSurvey, Examples) {
  bf::SurveyOptions o;
  o.dt = 1e-4;
  o.seed = 4;
  const std::vector<std::pair<double, double>> pairs{{0.0, 0.0}, {-0.1, 0.1}, {-0.2, 0.2}};
  const std::vector<double> horizons{0.1, 1.0, 10.0};
  const auto rows = bf::coalescence_survey(pairs, horizons, 1000, o);
  ASSERT_EQ(rows.size(), 9u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(rows[i].probability, 1.0);
  for (std::size_t p = 1; p < 3; ++p) {
    EXPECT_LE(rows[3 * p].probability, rows[3 * p + 1].probability);
    EXPECT_LE(rows[3 * p + 1].probability, rows[3 * p + 2].probability);
  }
  // doubling the separation lowers the short-horizon probability
  EXPECT_LT(rows[6].probability, rows[3].probability);
  EXPECT_NEAR(rows[4].censored_fraction, 1.0 - rows[4].probability, 1e-15);
  EXPECT_TRUE(bf::coalescence_survey(pairs, std::vector<double>{}, 10, o).empty());
}
