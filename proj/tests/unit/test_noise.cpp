// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include <brownflow/noise.hpp>
#include <brownflow/stats.hpp>

namespace bf = brownflow;

namespace {

const std::vector<bf::StreamLabel> kPm{bf::StreamLabel::plus(), bf::StreamLabel::minus()};

}  // namespace

TEST(MakeGrid, ExactDivision) {
  const bf::GridFit f = bf::make_grid(0.0, 1.0, 0.25);
  EXPECT_EQ(f.grid.n_steps, 4u);
  EXPECT_EQ(f.grid.t_end(), 1.0);
  EXPECT_EQ(f.remainder, 0.0);
}

TEST(MakeGrid, EmptyWindow) {
  const bf::GridFit f = bf::make_grid(0.0, 0.0, 0.1);
  EXPECT_EQ(f.grid.n_steps, 0u);
  EXPECT_EQ(f.grid.duration(), 0.0);
}

TEST(MakeGrid, RoundsAndReportsRemainder) {
  const bf::GridFit f = bf::make_grid(0.0, 1.0, 0.3);
  EXPECT_EQ(f.grid.n_steps, 3u);
  EXPECT_NEAR(f.grid.t_end(), 0.9, 1e-15);
  EXPECT_NEAR(f.remainder, 0.1, 1e-15);
}

TEST(MakeGrid, TimeIsMultiplicative) {
  const bf::TimeGrid g = bf::make_grid(2.0, 3.0, 1e-4).grid;
  for (std::size_t k : {0u, 1u, 777u, 10000u}) {
    EXPECT_EQ(g.time_at(k), 2.0 + static_cast<double>(k) * 1e-4);
  }
}

TEST(MakeGrid, Errors) {
  EXPECT_THROW(bf::make_grid(0.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(bf::make_grid(0.0, 1.0, -0.1), std::invalid_argument);
  EXPECT_THROW(bf::make_grid(0.0, std::numeric_limits<double>::infinity(), 0.1),
               std::invalid_argument);
  EXPECT_THROW(bf::make_grid(std::nan(""), 1.0, 0.1), std::invalid_argument);
  EXPECT_THROW(bf::make_grid(1.0, 0.0, 0.1), std::invalid_argument);
}

TEST(StreamLabel, Names) {
  EXPECT_EQ(bf::StreamLabel::plus().to_string(), "W_PLUS");
  EXPECT_EQ(bf::StreamLabel::minus().to_string(), "W_MINUS");
  EXPECT_EQ(bf::StreamLabel::aux(3).to_string(), "AUX(3)");
  EXPECT_NE(bf::StreamLabel::aux(0).key(), bf::StreamLabel::control(0).key());
}

TEST(SampleBundle, EmptyGridGivesEmptyStreams) {
  const bf::NoiseBundle b = bf::sample_bundle(bf::make_grid(0, 0, 0.1).grid, kPm, 1);
  EXPECT_TRUE(b.increments(bf::StreamLabel::plus()).empty());
  EXPECT_TRUE(b.increments(bf::StreamLabel::minus()).empty());
}

TEST(SampleBundle, BitwiseDeterministic) {
  const bf::TimeGrid g = bf::make_grid(0, 1, 1e-3).grid;
  EXPECT_TRUE(bf::sample_bundle(g, kPm, 42) == bf::sample_bundle(g, kPm, 42));
  EXPECT_FALSE(bf::sample_bundle(g, kPm, 42) == bf::sample_bundle(g, kPm, 43));
}

TEST(SampleBundle, AddingALabelLeavesOthersUntouched) {
  const bf::TimeGrid g = bf::make_grid(0, 1, 1e-3).grid;
  const bf::NoiseBundle a = bf::sample_bundle(g, kPm, 9);
  const std::vector<bf::StreamLabel> more{bf::StreamLabel::aux(5), bf::StreamLabel::minus(),
                                          bf::StreamLabel::plus()};
  const bf::NoiseBundle b = bf::sample_bundle(g, more, 9);
  const auto pa = a.increments(bf::StreamLabel::plus());
  const auto pb = b.increments(bf::StreamLabel::plus());
  ASSERT_EQ(pa.size(), pb.size());
  EXPECT_TRUE(std::equal(pa.begin(), pa.end(), pb.begin()));
}

TEST(SampleBundle, Errors) {
  const bf::TimeGrid g = bf::make_grid(0, 1, 0.1).grid;
  const std::vector<bf::StreamLabel> dup{bf::StreamLabel::plus(), bf::StreamLabel::plus()};
  EXPECT_THROW(bf::sample_bundle(g, dup, 1), std::invalid_argument);
  const bf::NoiseBundle b = bf::sample_bundle(g, kPm, 1);
  EXPECT_THROW(b.increments(bf::StreamLabel::aux(0)), std::out_of_range);
}

TEST(SampleBundle, IncrementsOnTheLattice) {
  const bf::NoiseBundle b = bf::sample_bundle(bf::make_grid(0, 1, 1e-3).grid, kPm, 5);
  for (double v : b.increments(bf::StreamLabel::plus())) {
    EXPECT_EQ(v, bf::to_lattice(v));
  }
}

// Per-step moments over many seeds, one step per seed.
TEST(SampleBundle, MomentsAcrossSeeds) {
  const double dt = 0.01;
  const bf::TimeGrid g = bf::make_grid(0, 3 * dt, dt).grid;
  const std::vector<bf::StreamLabel> plus{bf::StreamLabel::plus()};
  const std::size_t n = 100000;
  for (std::size_t step = 0; step < g.n_steps; ++step) {
    std::vector<double> v(n), sq(n);
    for (std::size_t s = 0; s < n; ++s) {
      v[s] = bf::sample_bundle(g, plus, s).increments(bf::StreamLabel::plus())[step];
      sq[s] = v[s] * v[s];
    }
    const bf::MCSummary m = bf::summarize(v);
    const bf::MCSummary q = bf::summarize(sq);
    EXPECT_LE(std::abs(m.mean), 4 * m.std_error) << "step " << step;
    EXPECT_LE(std::abs(q.mean - dt), 4 * q.std_error) << "step " << step;
  }
}

TEST(SampleBundle, StreamsUncorrelated) {
  const std::vector<bf::StreamLabel> labels{bf::StreamLabel::plus(), bf::StreamLabel::minus(),
                                            bf::StreamLabel::aux(0)};
  const bf::NoiseBundle b = bf::sample_bundle(bf::make_grid(0, 1, 1e-5).grid, labels, 77);
  const double dt = 1e-5;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      const auto a = b.increments(labels[i]);
      const auto c = b.increments(labels[j]);
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * c[k];
      const double corr = s / (static_cast<double>(a.size()) * dt);
      EXPECT_LE(std::abs(corr), 4.0 / std::sqrt(1e5));
    }
  }
}

TEST(SampleBundle, VarianceScalesWithDt) {
  const std::vector<bf::StreamLabel> plus{bf::StreamLabel::plus()};
  auto var = [&](double dt) {
    const auto b = bf::sample_bundle(bf::make_grid(0, 2e5 * dt, dt).grid, plus, 3);
    const auto w = b.increments(bf::StreamLabel::plus());
    std::vector<double> sq(w.begin(), w.end());
    for (double& x : sq) x *= x;
    return bf::summarize(sq);
  };
  const bf::MCSummary coarse = var(1e-2);
  const bf::MCSummary fine = var(0.25e-2);
  const double ratio = coarse.mean / fine.mean;
  const double se = ratio * std::hypot(coarse.std_error / coarse.mean, fine.std_error / fine.mean);
  EXPECT_NEAR(ratio, 4.0, 4 * se);
}

TEST(Cumulate, Examples) {
  EXPECT_EQ(bf::cumulate(std::vector<double>{}), std::vector<double>{0.0});
  EXPECT_EQ(bf::cumulate(std::vector<double>{0.5, -0.5}), (std::vector<double>{0.0, 0.5, 0.0}));
  const auto b = bf::sample_bundle(bf::make_grid(0, 1, 1e-3).grid, kPm, 8);
  const auto w = b.increments(bf::StreamLabel::plus());
  double s = 0.0;
  for (double x : w) s += x;
  EXPECT_EQ(bf::cumulate(w).back(), s);
  EXPECT_EQ(bf::cumulate(w).size(), w.size() + 1);
}

TEST(BundleDump, RoundTripAndLayout) {
  const std::vector<bf::StreamLabel> labels{bf::StreamLabel::plus(), bf::StreamLabel::aux(2)};
  const bf::NoiseBundle b = bf::sample_bundle(bf::make_grid(0, 1, 0.125).grid, labels, 0xabcdef);
  std::stringstream ss;
  bf::write_bundle(ss, b);
  const std::string bytes = ss.str();
  EXPECT_EQ(bytes.size(), 8u + 8u + 8u + 8u + 2 * 8u + 2 * 8 * 8u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[0]), 0xefu);  // little-endian seed
  std::stringstream in(bytes);
  EXPECT_TRUE(bf::read_bundle(in) == b);
}

TEST(BundleDump, TruncatedInput) {
  const bf::NoiseBundle b = bf::sample_bundle(bf::make_grid(0, 1, 0.125).grid, kPm, 1);
  std::stringstream ss;
  bf::write_bundle(ss, b);
  std::stringstream cut(ss.str().substr(0, 40));
  EXPECT_THROW(bf::read_bundle(cut), std::runtime_error);
}

TEST(Covariance, TablesAndBasis) {
  using bf::CovarianceKind;
  EXPECT_EQ(bf::covariance(CovarianceKind::c_pm, 1, 2), 1.0);
  EXPECT_EQ(bf::covariance(CovarianceKind::c_pm, -1, -2), 1.0);
  EXPECT_EQ(bf::covariance(CovarianceKind::c_pm, -1, 2), 0.0);
  EXPECT_EQ(bf::covariance(CovarianceKind::c_pm, 0, 2), 0.0);
  EXPECT_EQ(bf::covariance(CovarianceKind::c_plus, 1, 2), 1.0);
  EXPECT_EQ(bf::covariance(CovarianceKind::c_plus, -1, -2), 0.0);
  EXPECT_EQ(bf::e_plus(0.0) + bf::e_minus(0.0), 0.0);
  EXPECT_EQ(bf::to_string(CovarianceKind::c_pm), "C_PM");
}
