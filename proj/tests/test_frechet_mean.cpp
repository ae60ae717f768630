#include "spectral_frechet/frechet_mean.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "spectral_frechet/random_graphs.hpp"

using namespace spectral_frechet;

TEST(DefaultGeometry, KnownShapes) {
  const Eigen::VectorXd s1 = default_geometry(1);
  ASSERT_EQ(s1.size(), 1);
  EXPECT_DOUBLE_EQ(s1(0), 1.0);

  const Eigen::VectorXd s2 = default_geometry(2);
  EXPECT_DOUBLE_EQ(s2(0), 0.5);
  EXPECT_DOUBLE_EQ(s2(1), 0.5);

  const Eigen::VectorXd s3 = default_geometry(3);
  EXPECT_DOUBLE_EQ(s3(0), 0.5);
  EXPECT_DOUBLE_EQ(s3(1), 0.25);
  EXPECT_DOUBLE_EQ(s3(2), 0.25);

  for (const int c : {1, 2, 5, 12}) {
    const Eigen::VectorXd s = default_geometry(c);
    EXPECT_NEAR(s.sum(), 1.0, 1e-12);
    for (int i = 1; i < c; ++i) EXPECT_LE(s(i), s(i - 1) + 1e-15);
  }
  EXPECT_THROW(default_geometry(0), ArgumentError);
}

TEST(FitKernel, SingleCommunityClosedForm) {
  // c = 1 collapses to a scalar quadratic: optimum p = target / (n rho).
  const double rho = 0.1;
  const int n = 200;
  Eigen::VectorXd target_values(1);
  target_values << 12.0;
  Eigen::VectorXd s(1);
  s << 1.0;
  FitOptions opts;
  opts.rel_tol = 1e-12;
  opts.max_iters = 5000;
  const FitReport report = fit_kernel(Spectrum(target_values), s, rho, n, opts);
  EXPECT_TRUE(report.converged);
  EXPECT_LE(report.objective_trace.back(), 1e-10);
  EXPECT_NEAR(report.kernel.p()(0), 12.0 / (n * rho), 1e-6);
}

TEST(FitKernel, RecoversKnownBlockDiagonalKernel) {
  // Self-consistency: target produced by a known block-diagonal kernel with
  // the default geometry must be matched to 1e-4 relative. The truth has
  // unit L1 mass (sum theta_i s_i = 1), the same normalization the fit
  // imposes, so it lies inside the searched family.
  const int c = 3, n = 500;
  const double rho = 0.08;
  const Eigen::VectorXd s = default_geometry(c);
  Eigen::VectorXd theta(c);
  theta << 1.5, 0.6, 0.4;  // theta . s = 0.75 + 0.15 + 0.10 = 1
  const SbmKernel truth = kernel_from_target_eigenvalues(Spectrum(theta), s, rho);
  const Spectrum target = expected_extreme_eigenvalues(truth, n);

  FitOptions opts;
  opts.rel_tol = 1e-9;
  opts.max_iters = 3000;
  const FitReport report = fit_kernel(target, s, rho, n, opts);
  const Spectrum fitted = report.fitted_extremes(n);
  for (int i = 0; i < c; ++i)
    EXPECT_NEAR(fitted[i], target[i], 1e-4 * std::abs(target[i]));
}

TEST(FitKernel, TraceIsNonIncreasingAndGradientSmallAtConvergence) {
  const int n = 400;
  const double rho = 0.1;
  const Eigen::VectorXd s = default_geometry(4);
  Eigen::VectorXd target_values(4);
  target_values << 30.0, 22.0, 11.0, 6.0;
  const Spectrum target(target_values);
  FitOptions opts;
  const FitReport report = fit_kernel(target, s, rho, n, opts);
  for (std::size_t i = 1; i < report.objective_trace.size(); ++i)
    EXPECT_LE(report.objective_trace[i], report.objective_trace[i - 1]);
  if (report.converged) {
    const Eigen::VectorXd grad = fit_objective_gradient(
        target, s, rho, n, report.kernel.p(), opts.fd_step);
    // Interior converged point: full gradient is the reduced gradient.
    EXPECT_LE(grad.norm(), 1e-3 * (1.0 + report.objective_trace.back()) + 1e-9);
  }
}

TEST(FitKernel, CenteredDifferencesAgreeWithRefinedStep) {
  const int n = 300;
  const double rho = 0.12;
  const Eigen::VectorXd s = default_geometry(3);
  Eigen::VectorXd target_values(3);
  target_values << 25.0, 14.0, 7.0;
  const Spectrum target(target_values);
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd p(3);
    for (int i = 0; i < 3; ++i) p(i) = (0.15 + 0.7 * unit(gen)) / rho;
    const Eigen::VectorXd coarse = fit_objective_gradient(target, s, rho, n, p, 1e-4);
    const Eigen::VectorXd fine = fit_objective_gradient(target, s, rho, n, p, 1e-5);
    EXPECT_LE((coarse - fine).norm(), 1e-3 * fine.norm() + 1e-12);
  }
}

TEST(FitKernel, InfeasibleNormalizationReturnsBestEffort) {
  // Targets so large that matching them needs more diagonal mass than
  // ||f||_1 = 1 allows: q pins at its clamp and the fit still returns its
  // best iterate instead of failing.
  const Eigen::VectorXd s = default_geometry(2);
  Eigen::VectorXd target_values(2);
  target_values << 60.0, 50.0;  // lambda(L_f) would need [6, 5] at n*rho = 10
  const FitReport report = fit_kernel(Spectrum(target_values), s, 0.1, 100, FitOptions{});
  EXPECT_FALSE(report.objective_trace.empty());
  EXPECT_TRUE(report.normalization_clamped);
  const double cap = 1.0 / 0.1;
  EXPECT_LE(report.kernel.p().maxCoeff(), cap + 1e-12);
}

TEST(FitKernel, NegativeTargetWarnsButRuns) {
  const Eigen::VectorXd s = default_geometry(2);
  Eigen::VectorXd target_values(2);
  target_values << 20.0, -3.0;
  const FitReport report = fit_kernel(Spectrum(target_values), s, 0.1, 300, FitOptions{});
  EXPECT_TRUE(report.negative_target);
  EXPECT_FALSE(report.objective_trace.empty());

  Eigen::VectorXd bad(2);
  bad << 20.0, std::nan("");
  EXPECT_THROW(fit_kernel(Spectrum(bad), s, 0.1, 300, FitOptions{}), ArgumentError);
}

TEST(SetMeanGraph, SingletonAndIdenticalLists) {
  const Graph g = Graph::complete(4);
  const std::vector<Graph> single{g};
  EXPECT_TRUE(set_mean_graph(single, 2) == g);
  const std::vector<Graph> same{g, g, g};
  EXPECT_EQ(set_mean_index(same, 2), 0u);  // ties break to the lowest index
}

TEST(SetMeanGraph, PicksCentralMember) {
  // Two tight ER graphs and one empty outlier: the mean is one of the pair.
  std::vector<Graph> graphs;
  graphs.push_back(Graph(30));
  graphs.push_back(erdos_renyi(30, 0.5, RngSeed{1}));
  graphs.push_back(erdos_renyi(30, 0.5, RngSeed{2}));
  const std::size_t pick = set_mean_index(graphs, 5);
  EXPECT_GE(pick, 1u);
}

TEST(BruteForce, SingletonSampleReachesZeroObjective) {
  std::mt19937_64 gen(3);
  const Graph g = testing_support::random_graph(gen, 4, 0.5);
  const std::vector<Graph> sample{g};
  const BruteForceResult result = brute_force_frechet_mean(sample, 2);
  EXPECT_NEAR(result.objective, 0.0, 1e-18);
}

TEST(BruteForce, TwoVertexUniverse) {
  Graph k2 = Graph::complete(2);
  const std::vector<Graph> sample{k2, k2};
  const BruteForceResult result = brute_force_frechet_mean(sample, 1);
  EXPECT_TRUE(result.graph == k2);
  EXPECT_NEAR(result.objective, 0.0, 1e-18);
}

TEST(BruteForce, RefusesLargeGraphs) {
  const std::vector<Graph> sample{Graph(6)};
  EXPECT_THROW(brute_force_frechet_mean(sample, 1), ArgumentError);
}

TEST(BruteForce, ProjectionEquivalenceOnTinyInstances) {
  // The minimizer's truncated spectrum must be the realizable spectrum
  // closest to the sample mean spectrum (checked by the same enumeration).
  std::mt19937_64 gen(11);
  for (const int n : {3, 4}) {
    const std::uint64_t codes = std::uint64_t{1} << (n * (n - 1) / 2);
    for (const int c : {1, 2}) {
      for (int trial = 0; trial < 10; ++trial) {
        std::vector<Graph> sample;
        for (int k = 0; k < 3; ++k)
          sample.push_back(testing_support::random_graph(gen, n, 0.5));
        const BruteForceResult bf = brute_force_frechet_mean(sample, c);

        const Spectrum mean = mean_spectrum(sample, c);
        double best_projection = std::numeric_limits<double>::infinity();
        for (std::uint64_t code = 0; code < codes; ++code) {
          const Graph g = [&] {
            Graph built(n);
            int bit = 0;
            for (int u = 0; u < n; ++u)
              for (int v = u + 1; v < n; ++v, ++bit)
                if ((code >> bit) & 1u) built.add_edge(u, v);
            return built;
          }();
          const double dist = (truncated_spectrum(g, c).values - mean.values).norm();
          best_projection = std::min(best_projection, dist);
        }
        const double bf_dist =
            (truncated_spectrum(bf.graph, c).values - mean.values).norm();
        EXPECT_NEAR(bf_dist, best_projection, 1e-10);
      }
    }
  }
}

TEST(ApproximateMean, DegenerateSampleMatchesMemberSpectrum) {
  // N copies of one realization: target equals that graph's truncated
  // spectrum exactly, and the fit tracks it.
  const Graph g = erdos_renyi(150, 0.3, RngSeed{17});
  const std::vector<Graph> sample{g, g, g, g};
  FitOptions opts;
  opts.c_override = 1;
  opts.rel_tol = 1e-10;
  opts.max_iters = 2000;
  const FrechetMeanResult result = approximate_frechet_mean(sample, opts);
  EXPECT_EQ(result.c, 1);
  const Spectrum sigma = truncated_spectrum(g, 1);
  EXPECT_DOUBLE_EQ(result.fit.target[0], sigma[0]);
  EXPECT_NEAR(result.fit.fitted_extremes(150)[0], sigma[0], 1e-4 * sigma[0]);
  EXPECT_EQ(result.mean_graph.vertex_count(), 150);
}

TEST(ApproximateMean, InvariantUnderVertexRelabeling) {
  std::mt19937_64 gen(29);
  std::vector<Graph> sample, relabeled;
  Eigen::VectorXd s(2), p(2);
  s << 0.5, 0.5;
  p << 0.6, 0.3;
  const SbmKernel kernel = SbmKernel::uniform_cross(0.5, s, p, 0.1);
  for (int k = 0; k < 6; ++k) {
    sample.push_back(sample_kernel_graph(kernel, 80, RngSeed{40 + static_cast<std::uint64_t>(k)}));
    relabeled.push_back(testing_support::relabel(gen, sample.back()));
  }
  FitOptions opts;
  opts.c_override = 2;
  opts.rel_tol = 1e-9;
  opts.max_iters = 3000;
  const FrechetMeanResult a = approximate_frechet_mean(sample, opts);
  const FrechetMeanResult b = approximate_frechet_mean(relabeled, opts);
  EXPECT_EQ(a.c, b.c);
  // Spectra and densities are permutation-invariant, so targets agree to
  // eigensolver accuracy and both fits chase the same optimum.
  EXPECT_NEAR((a.fit.target.values - b.fit.target.values).norm(), 0.0, 1e-7);
  const Spectrum fa = a.fit.fitted_extremes(80);
  const Spectrum fb = b.fit.fitted_extremes(80);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(fa[i], fb[i], 1e-3 * std::abs(fa[i]));
}

TEST(ApproximateMean, RejectsDegenerateDensities) {
  const std::vector<Graph> empty{Graph(10), Graph(10)};
  EXPECT_THROW(approximate_frechet_mean(empty, FitOptions{}), ArgumentError);
  const std::vector<Graph> full{Graph::complete(5)};
  EXPECT_THROW(approximate_frechet_mean(full, FitOptions{}), ArgumentError);
  const std::vector<Graph> mixed{erdos_renyi(10, 0.5, RngSeed{1}), Graph(11)};
  EXPECT_THROW(approximate_frechet_mean(mixed, FitOptions{}), ArgumentError);
}
