#pragma once

#include <cstdint>
#include <vector>

#include "spectral_frechet/errors.hpp"
#include "spectral_frechet/graph.hpp"
#include "spectral_frechet/rng.hpp"
#include "spectral_frechet/sbm_kernel.hpp"

namespace spectral_frechet {

/// Draws a graph from the kernel probability measure: edge {i,j} is an
/// independent Bernoulli with probability rho*f(i/n, j/n), grid indices
/// starting at 1.
///
/// Pair {i,j} (0-based, i < j) reads word i*n + j of the SplitMix64 stream
/// seeded by `seed`, so the sample does not depend on traversal order.
inline Graph sample_kernel_graph(const SbmKernel& kernel, int n, RngSeed seed) {
  if (n < 2) throw ArgumentError("sample_kernel_graph: n must be at least 2");
  const int c = kernel.communities();

  // Vertex v (0-based) sits at grid point (v+1)/n; the point 1.0 falls in
  // the last block.
  std::vector<int> block(n);
  for (int v = 0; v < n; ++v)
    block[v] = kernel.block_of(static_cast<double>(v + 1) / n);

  std::vector<std::vector<double>> prob(c, std::vector<double>(c));
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b) {
      const double pr = kernel.rho() * (a == b ? kernel.p()(a) : kernel.q_matrix()(a, b));
      if (pr < 0.0 || pr > 1.0)
        throw ArgumentError("sample_kernel_graph: kernel is not a valid probability field");
      prob[a][b] = pr;
    }

  Graph g(n);
  for (int i = 0; i < n; ++i) {
    const double* row = prob[block[i]].data();
    for (int j = i + 1; j < n; ++j) {
      const std::uint64_t word = rng::splitmix64_at(
          seed.value, static_cast<std::uint64_t>(i) * n + static_cast<std::uint64_t>(j));
      if (rng::to_unit(word) < row[block[j]]) g.add_edge(i, j);
    }
  }
  return g;
}

/// Erdos-Renyi G(n, p) as the constant-kernel special case.
inline Graph erdos_renyi(int n, double edge_prob, RngSeed seed) {
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
    throw ArgumentError("erdos_renyi: edge probability must lie in [0,1]");
  if (edge_prob == 0.0) return Graph(n < 2 ? 2 : n);
  Eigen::VectorXd s(1), p(1);
  s << 1.0;
  p << 1.0;
  return sample_kernel_graph(SbmKernel(edge_prob, s, p, Eigen::MatrixXd::Zero(1, 1)), n, seed);
}

/// Preferential attachment. Starts from the complete graph on m0 vertices;
/// each arriving vertex attaches m distinct edges with probability
/// proportional to current degree (targets redrawn until distinct, degrees
/// frozen while one vertex attaches).
inline Graph barabasi_albert(int n, int m0, int m, RngSeed seed) {
  if (m < 1 || m > m0 || m0 > n)
    throw ArgumentError("barabasi_albert: need 1 <= m <= m0 <= n");
  if (n == m0) return Graph::complete(m0);

  rng::Xoshiro256 gen(seed.value);
  Graph g(n);
  for (int u = 0; u < m0; ++u)
    for (int v = u + 1; v < m0; ++v) g.add_edge(u, v);

  // One entry per edge endpoint; sampling an index uniformly is sampling a
  // vertex with probability proportional to its degree.
  std::vector<int> endpoints;
  endpoints.reserve(2 * (static_cast<std::size_t>(m0) * (m0 - 1) / 2
                         + static_cast<std::size_t>(n - m0) * m));
  for (int u = 0; u < m0; ++u)
    for (int v = u + 1; v < m0; ++v) {
      endpoints.push_back(u);
      endpoints.push_back(v);
    }

  std::vector<int> targets;
  targets.reserve(m);
  for (int v = m0; v < n; ++v) {
    targets.clear();
    while (static_cast<int>(targets.size()) < m) {
      const int t = endpoints[gen.below(endpoints.size())];
      bool dup = false;
      for (const int chosen : targets) dup = dup || (chosen == t);
      if (!dup) targets.push_back(t);
    }
    for (const int t : targets) {
      g.add_edge(v, t);
      endpoints.push_back(v);
      endpoints.push_back(t);
    }
  }
  return g;
}

/// Watts-Strogatz small world. Ring lattice with K nearest neighbors per
/// vertex; each lattice edge (i, i+d), d = 1..K/2, rewired independently
/// with probability beta to (i, j') with j' uniform among non-self,
/// non-duplicate targets. Edge count stays exactly nK/2.
inline Graph watts_strogatz(int n, int K, double beta, RngSeed seed) {
  if (K < 2 || K % 2 != 0 || K >= n)
    throw ArgumentError("watts_strogatz: K must be even with 2 <= K < n");
  if (!(beta >= 0.0 && beta <= 1.0))
    throw ArgumentError("watts_strogatz: beta must lie in [0,1]");

  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int d = 1; d <= K / 2; ++d) g.add_edge(i, (i + d) % n);

  if (beta == 0.0) return g;
  rng::Xoshiro256 gen(seed.value);
  for (int i = 0; i < n; ++i) {
    for (int d = 1; d <= K / 2; ++d) {
      const int j = (i + d) % n;
      if (gen.uniform() >= beta) continue;
      if (g.degree(i) == n - 1) continue;  // no legal rewiring target
      int target;
      do {
        target = static_cast<int>(gen.below(static_cast<std::uint64_t>(n)));
      } while (target == i || g.has_edge(i, target));
      g.remove_edge(i, j);
      g.add_edge(i, target);
    }
  }
  return g;
}

}  // namespace spectral_frechet
