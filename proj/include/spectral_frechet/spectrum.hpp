#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <span>
#include <utility>
#include <vector>

#include "spectral_frechet/errors.hpp"
#include "spectral_frechet/graph.hpp"
#include "spectral_frechet/parallel.hpp"

namespace spectral_frechet {

/// Descending-sorted real eigenvalue vector, full (length n) or truncated
/// (length c). The full adjacency spectrum of a graph sums to zero.
struct Spectrum {
  Eigen::VectorXd values;

  Spectrum() = default;
  /// Caller promises `v` is already descending.
  explicit Spectrum(Eigen::VectorXd v) : values(std::move(v)) {}

  static Spectrum sorted_descending(Eigen::VectorXd v) {
    std::stable_sort(v.data(), v.data() + v.size(), std::greater<double>());
    return Spectrum(std::move(v));
  }

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values(i); }

  Spectrum head(int c) const {
    if (c < 1 || c > size()) throw ArgumentError("Spectrum: truncation length out of range");
    return Spectrum(values.head(c));
  }

  bool is_descending(double tol = 0.0) const {
    for (int i = 0; i + 1 < size(); ++i)
      if (values(i) + tol < values(i + 1)) return false;
    return true;
  }
};

namespace detail {

/// Eigenvalues of a symmetric matrix, descending. Dense solver; absolute
/// accuracy is machine-level, well inside the 1e-8 documented tolerance
/// for graphs up to n = 2000.
inline Spectrum symmetric_eigenvalues(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericError("symmetric eigensolver failed to converge");
  return Spectrum(solver.eigenvalues().reverse());
}

}  // namespace detail

/// All n adjacency eigenvalues, descending.
inline Spectrum adjacency_spectrum(const Graph& g) {
  return detail::symmetric_eigenvalues(g.adjacency_matrix());
}

/// First c adjacency eigenvalues, 1 <= c <= n.
inline Spectrum truncated_spectrum(const Graph& g, int c) {
  if (c < 1 || c > g.vertex_count())
    throw ArgumentError("truncated_spectrum: c out of range");
  return adjacency_spectrum(g).head(c);
}

/// l2 distance between the full adjacency spectra of two equal-size graphs.
inline double spectral_distance(const Graph& g, const Graph& h) {
  if (g.vertex_count() != h.vertex_count())
    throw ArgumentError("spectral_distance: graphs must have equal size");
  return (adjacency_spectrum(g).values - adjacency_spectrum(h).values).norm();
}

/// l2 distance between the c largest adjacency eigenvalues.
inline double truncated_spectral_distance(const Graph& g, const Graph& h, int c) {
  if (g.vertex_count() != h.vertex_count())
    throw ArgumentError("truncated_spectral_distance: graphs must have equal size");
  if (c < 1 || c > g.vertex_count())
    throw ArgumentError("truncated_spectral_distance: c out of range");
  return (truncated_spectrum(g, c).values - truncated_spectrum(h, c).values).norm();
}

/// Full spectra of a whole sample, computed in parallel across graphs.
inline std::vector<Spectrum> adjacency_spectra(std::span<const Graph> sample) {
  std::vector<Spectrum> out(sample.size());
  parallel_for(sample.size(), [&](std::size_t k) { out[k] = adjacency_spectrum(sample[k]); });
  return out;
}

namespace detail {

inline void check_sample(std::span<const Graph> sample) {
  if (sample.empty()) throw ArgumentError("sample must be nonempty");
  const int n = sample.front().vertex_count();
  for (const Graph& g : sample)
    if (g.vertex_count() != n)
      throw ArgumentError("sample graphs must all have the same size");
}

/// Entrywise average of descending spectra stays descending; sorting is
/// skipped on purpose.
inline Spectrum mean_of(const std::vector<Spectrum>& spectra, int c) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(c);
  for (const Spectrum& s : spectra) acc += s.values.head(c);
  acc /= static_cast<double>(spectra.size());
  return Spectrum(std::move(acc));
}

}  // namespace detail

/// Entrywise average of the truncated spectra of a sample; c = n gives the
/// full mean spectrum.
inline Spectrum mean_spectrum(std::span<const Graph> sample, int c) {
  detail::check_sample(sample);
  const int n = sample.front().vertex_count();
  if (c < 1 || c > n) throw ArgumentError("mean_spectrum: c out of range");
  return detail::mean_of(adjacency_spectra(sample), c);
}

}  // namespace spectral_frechet
