#include "spectral_frechet/bulk_estimator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "spectral_frechet/random_graphs.hpp"
#include "spectral_frechet/spectrum.hpp"

using namespace spectral_frechet;

TEST(SemicircleCdf, EndpointsAndCenter) {
  for (const double r : {0.5, 1.0, 17.0}) {
    EXPECT_DOUBLE_EQ(semicircle_cdf(-r, r), 0.0);
    EXPECT_DOUBLE_EQ(semicircle_cdf(r, r), 1.0);
    EXPECT_DOUBLE_EQ(semicircle_cdf(-2 * r, r), 0.0);
    EXPECT_DOUBLE_EQ(semicircle_cdf(2 * r, r), 1.0);
    EXPECT_NEAR(semicircle_cdf(0.0, r), 0.5, 1e-15);
  }
}

TEST(SemicircleCdf, MatchesQuadratureOfPdf) {
  // Independent oracle: integrate the density numerically up to x.
  const double r = 1.0;
  const auto oracle = [&](double x) {
    return testing_support::simpson([&](double t) { return semicircle_pdf(t, r); },
                                    -r, x, 20000);
  };
  EXPECT_NEAR(oracle(0.5), 0.8045, 5e-5);  // frozen reference value
  for (const double x : {-0.9, -0.3, 0.1, 0.5, 0.77}) {
    EXPECT_NEAR(semicircle_cdf(x, r), oracle(x), 1e-6);
  }
}

TEST(SemicircleCdf, MonotoneAndConsistentWithPdf) {
  const double r = 2.5;
  double prev = -1.0;
  const double h = 1e-5;
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = -r + 2 * r * i / 400.0;
    const double value = semicircle_cdf(x, r);
    EXPECT_GE(value, prev);
    prev = value;
    if (x > -r + 0.01 && x < r - 0.01) {
      const double deriv = (semicircle_cdf(x + h, r) - semicircle_cdf(x - h, r)) / (2 * h);
      worst = std::max(worst, std::abs(deriv - semicircle_pdf(x, r)));
    }
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(OrderStatMoments, MedianOfSymmetricLawIsZero) {
  const int m = 101;
  const OrderStatMoments mid = order_stat_moments(1.0, m, (m + 1) / 2);
  EXPECT_NEAR(mid.mean, 0.0, 1e-7);
}

TEST(OrderStatMoments, MaximumBelowRadiusAndGrowingWithM) {
  double prev = 0.0;
  for (const int m : {10, 100, 1000}) {
    const OrderStatMoments top = order_stat_moments(1.0, m, 1);
    EXPECT_LT(top.mean, 1.0);
    EXPECT_GT(top.mean, prev);
    prev = top.mean;
  }
}

TEST(OrderStatMoments, DecreasingInRank) {
  double prev = 2.0;
  for (int j = 1; j <= 6; ++j) {
    const OrderStatMoments mom = order_stat_moments(1.0, 500, j);
    EXPECT_LT(mom.mean, prev);
    EXPECT_GT(mom.std_dev, 0.0);
    prev = mom.mean;
  }
}

TEST(OrderStatMoments, ScaleEquivariance) {
  const double alpha = 7.5;
  for (const int j : {1, 3}) {
    const OrderStatMoments unit = order_stat_moments(1.0, 300, j);
    const OrderStatMoments scaled = order_stat_moments(alpha, 300, j);
    EXPECT_NEAR(scaled.mean, alpha * unit.mean, 1e-6 * alpha);
    EXPECT_NEAR(scaled.std_dev, alpha * unit.std_dev, 1e-6 * alpha);
  }
}

TEST(OrderStatMoments, MatchesMonteCarloForLargeM) {
  // Exact order-statistic sampler: the j-th largest of m uniforms is
  // Beta(m-j+1, j); push it through the inverse semicircle CDF.
  const double r = 1.0;
  const int m = 1000, j = 1;
  const OrderStatMoments mom = order_stat_moments(r, m, j);

  std::mt19937_64 gen(4242);
  std::gamma_distribution<double> ga(m - j + 1, 1.0), gb(j, 1.0);
  const auto cdf = [&](double x) { return semicircle_cdf(x, r); };
  const int trials = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double a = ga(gen), b = gb(gen);
    const double u = a / (a + b);
    const double x = testing_support::inverse_semicircle_cdf(u, r, cdf);
    sum += x;
    sum_sq += x * x;
  }
  const double mc_mean = sum / trials;
  const double mc_var = sum_sq / trials - mc_mean * mc_mean;
  const double mc_std = std::sqrt(mc_var);
  const double se_mean = mc_std / std::sqrt(static_cast<double>(trials));
  const double se_std = mc_std / std::sqrt(2.0 * (trials - 1.0));
  EXPECT_NEAR(mom.mean, mc_mean, 3.0 * se_mean);
  EXPECT_NEAR(mom.std_dev, mc_std, 3.0 * se_std);
}

TEST(OrderStatMoments, RejectsBadArguments) {
  EXPECT_THROW(order_stat_moments(0.0, 10, 1), ArgumentError);
  EXPECT_THROW(order_stat_moments(1.0, 10, 0), ArgumentError);
  EXPECT_THROW(order_stat_moments(1.0, 10, 11), ArgumentError);
}

TEST(EstimateC, SingleOutlierSpectrum) {
  // Synthetic spectrum: one detached eigenvalue, then a bulk whose entries
  // are exactly the expected top order statistics of n-2 semicircle draws
  // under the radius the scan will pick at i = 2. The scan must reject
  // i = 1 and settle immediately at i = 2, reporting c = 1.
  const int n = 120;
  const double r = 2.0;
  Eigen::VectorXd values(n);
  values(0) = 10.0;
  values(1) = r;
  for (int j = 1; j <= n - 2; ++j)
    values(1 + j) = order_stat_moments(r, n - 2, j).mean;
  const Spectrum spectrum(values);
  ASSERT_TRUE(spectrum.is_descending());
  const CEstimate est = estimate_c(spectrum, 5);
  EXPECT_EQ(est.c, 1);
  EXPECT_FALSE(est.exhausted);
  ASSERT_EQ(est.iterations.size(), 2u);
  EXPECT_FALSE(est.iterations[0].all_within);
  EXPECT_TRUE(est.iterations[1].all_within);
  EXPECT_DOUBLE_EQ(est.iterations[1].radius, r);
}

TEST(EstimateC, ErdosRenyiMeanSpectrumHasOneOutlier) {
  // 15 ER graphs at modest scale; the averaged spectrum keeps one
  // eigenvalue (~np) detached from the semicircle bulk.
  const int n = 300, N = 15;
  std::vector<Graph> sample;
  sample.reserve(N);
  for (int k = 0; k < N; ++k)
    sample.push_back(erdos_renyi(n, 0.1, RngSeed{1000 + static_cast<std::uint64_t>(k)}));
  const Spectrum mean = mean_spectrum(sample, n);
  const CEstimate est = estimate_c(mean, 5);
  EXPECT_EQ(est.c, 1);
}

TEST(EstimateC, ThreeBlockMeanSpectrum) {
  Eigen::VectorXd s(3), p(3);
  s << 1.0 / 3, 1.0 / 3, 1.0 / 3;
  p << 0.55, 0.35, 0.2;
  const SbmKernel kernel = SbmKernel::canonicalized(1.0, s, p, Eigen::MatrixXd::Constant(3, 3, 0.08)
                                                                - 0.08 * Eigen::MatrixXd::Identity(3, 3));
  const int n = 300, N = 15;
  std::vector<Graph> sample;
  for (int k = 0; k < N; ++k)
    sample.push_back(sample_kernel_graph(kernel, n, RngSeed{500 + static_cast<std::uint64_t>(k)}));
  const CEstimate est = estimate_c(mean_spectrum(sample, n), 5);
  EXPECT_EQ(est.c, 3);
}

TEST(EstimateC, ScaleEquivariant) {
  const int n = 300, N = 10;
  std::vector<Graph> sample;
  for (int k = 0; k < N; ++k)
    sample.push_back(erdos_renyi(n, 0.12, RngSeed{30 + static_cast<std::uint64_t>(k)}));
  const Spectrum mean = mean_spectrum(sample, n);
  const CEstimate base = estimate_c(mean, 5);
  const CEstimate scaled = estimate_c(Spectrum(7.0 * mean.values), 5);
  EXPECT_EQ(base.c, scaled.c);
}

TEST(EstimateC, ExhaustionReturnsFlaggedFloor) {
  // A constant positive spectrum never looks like semicircle order
  // statistics (the deep ranks expect values far below the radius), so the
  // scan walks off the end and must say so.
  const int n = 12;
  const Eigen::VectorXd values = Eigen::VectorXd::Constant(n, 5.0);
  const CEstimate est = estimate_c(Spectrum(values), 5);
  EXPECT_TRUE(est.exhausted);
  EXPECT_GE(est.c, 1);
  EXPECT_THROW(estimate_c(Spectrum(values), 11), ArgumentError);
  EXPECT_THROW(estimate_c(Spectrum(values), 0), ArgumentError);
}
