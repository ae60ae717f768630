#pragma once

// Test-side oracles and generators. Everything here is deliberately
// independent of the library code paths it is used to check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "spectral_frechet/graph.hpp"

namespace testing_support {

/// Plain composite Simpson rule on a uniform grid (panels must be even).
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int panels) {
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

/// Rejection sampler for the semicircle law on [-r, r].
inline double sample_semicircle(std::mt19937_64& gen, double r) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const double x = r * (2.0 * unit(gen) - 1.0);
    if (unit(gen) < std::sqrt(std::max(1.0 - (x / r) * (x / r), 0.0))) return x;
  }
}

/// Inverse semicircle CDF by bisection; cdf must be monotone on [-r, r].
inline double inverse_semicircle_cdf(double u, double r,
                                     const std::function<double(double)>& cdf) {
  double lo = -r, hi = r;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Erdos-Renyi graph from a std RNG; test-local, unrelated to the library
/// samplers.
inline spectral_frechet::Graph random_graph(std::mt19937_64& gen, int n, double p) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  spectral_frechet::Graph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (unit(gen) < p) g.add_edge(u, v);
  return g;
}

/// Graph with vertices relabeled by a random permutation.
inline spectral_frechet::Graph relabel(std::mt19937_64& gen, const spectral_frechet::Graph& g) {
  std::vector<int> perm(g.vertex_count());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  std::shuffle(perm.begin(), perm.end(), gen);
  spectral_frechet::Graph out(g.vertex_count());
  g.for_each_edge([&](int u, int v) { out.add_edge(perm[u], perm[v]); });
  return out;
}

/// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

/// Dense m-point discretization of the integral operator with a piecewise
/// constant kernel: matrix F[a][b] = value(a/m, b/m) / m on the grid
/// {1/m, ..., 1}, with 1.0 assigned to the last block. `value` must already
/// include any scaling the caller wants.
inline Eigen::MatrixXd discretize_kernel(
    int m, const std::function<double(double, double)>& value) {
  Eigen::MatrixXd f(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      f(a, b) = value(static_cast<double>(a + 1) / m, static_cast<double>(b + 1) / m) / m;
  return f;
}

}  // namespace testing_support
