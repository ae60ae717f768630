#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <utility>
#include <vector>

#include "spectral_frechet/errors.hpp"
#include "spectral_frechet/spectrum.hpp"

namespace spectral_frechet {

/// Canonical stochastic block model kernel.
///
/// The kernel is piecewise constant over the blocks of [0,1)^2 cut at
/// cumulative community boundaries S_i = s_1 + ... + s_i: rho*p_i on the
/// diagonal block i and rho*q_ij on the off-diagonal block (i,j). It is an
/// edge-probability field, so rho*p and rho*q must stay inside [0,1].
class SbmKernel {
 public:
  SbmKernel(double rho, Eigen::VectorXd s, Eigen::VectorXd p, Eigen::MatrixXd q_matrix)
      : rho_(rho), s_(std::move(s)), p_(std::move(p)), q_(std::move(q_matrix)) {
    validate();
    build_boundaries();
  }

  /// Kernel with one shared cross-community density q.
  static SbmKernel uniform_cross(double rho, Eigen::VectorXd s, Eigen::VectorXd p, double q) {
    const auto c = s.size();
    Eigen::MatrixXd qm = Eigen::MatrixXd::Constant(c, c, q);
    qm.diagonal().setZero();
    return SbmKernel(rho, std::move(s), std::move(p), std::move(qm));
  }

  /// Reorders blocks so that s is non-increasing, permuting p and Q in step.
  /// Block permutations relabel vertices of the sampled graphs but leave the
  /// operator spectrum and the sampling distribution of spectra unchanged.
  static SbmKernel canonicalized(double rho, const Eigen::VectorXd& s,
                                 const Eigen::VectorXd& p, const Eigen::MatrixXd& q_matrix) {
    const int c = static_cast<int>(s.size());
    std::vector<int> order(c);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return s(a) > s(b); });
    Eigen::VectorXd s2(c), p2(c);
    Eigen::MatrixXd q2(c, c);
    for (int i = 0; i < c; ++i) {
      s2(i) = s(order[i]);
      p2(i) = p(order[i]);
      for (int j = 0; j < c; ++j) q2(i, j) = q_matrix(order[i], order[j]);
    }
    return SbmKernel(rho, std::move(s2), std::move(p2), std::move(q2));
  }

  double rho() const { return rho_; }
  const Eigen::VectorXd& s() const { return s_; }
  const Eigen::VectorXd& p() const { return p_; }
  const Eigen::MatrixXd& q_matrix() const { return q_; }
  int communities() const { return static_cast<int>(s_.size()); }

  /// Block containing x. Accepts x in [0,1]; x = 1 belongs to the last block.
  int block_of(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError("SbmKernel: point outside [0,1]");
    const auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), x);
    const int idx = static_cast<int>(it - boundaries_.begin());
    return std::min(idx, communities() - 1);
  }

  /// rho*f(x,y) for x, y in [0,1).
  double value(double x, double y) const {
    if (!(x >= 0.0 && x < 1.0) || !(y >= 0.0 && y < 1.0))
      throw ArgumentError("kernel_value: arguments must lie in [0,1)");
    const int bi = block_of(x);
    const int bj = block_of(y);
    return rho_ * (bi == bj ? p_(bi) : q_(bi, bj));
  }

 private:
  void validate() const {
    const auto c = s_.size();
    if (c < 1) throw ArgumentError("SbmKernel: needs at least one community");
    if (p_.size() != c) throw ArgumentError("SbmKernel: p and s sizes differ");
    if (q_.rows() != c || q_.cols() != c)
      throw ArgumentError("SbmKernel: Q must be c x c");
    if (!(rho_ > 0.0 && rho_ <= 1.0))
      throw ArgumentError("SbmKernel: rho must lie in (0,1]");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < c; ++i) {
      if (!(s_(i) > 0.0)) throw ArgumentError("SbmKernel: community sizes must be positive");
      if (i > 0 && s_(i) > s_(i - 1) + 1e-12)
        throw ArgumentError("SbmKernel: community sizes must be non-increasing");
      sum += s_(i);
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ArgumentError("SbmKernel: community sizes must sum to 1");
    for (Eigen::Index i = 0; i < c; ++i) {
      if (!(p_(i) > 0.0)) throw ArgumentError("SbmKernel: within-densities must be positive");
      if (rho_ * p_(i) > 1.0 + 1e-12)
        throw ArgumentError("SbmKernel: rho*p must not exceed 1");
      if (std::abs(q_(i, i)) != 0.0)
        throw ArgumentError("SbmKernel: Q must have zero diagonal");
      for (Eigen::Index j = 0; j < c; ++j) {
        if (q_(i, j) != q_(j, i)) throw ArgumentError("SbmKernel: Q must be symmetric");
        if (q_(i, j) < 0.0 || rho_ * q_(i, j) > 1.0 + 1e-12)
          throw ArgumentError("SbmKernel: rho*q must lie in [0,1]");
      }
    }
  }

  void build_boundaries() {
    boundaries_.resize(static_cast<std::size_t>(s_.size()) - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(s_.size()); ++i) {
      acc += s_(static_cast<Eigen::Index>(i));
      boundaries_[i] = acc;
    }
  }

  double rho_;
  Eigen::VectorXd s_;
  Eigen::VectorXd p_;
  Eigen::MatrixXd q_;
  std::vector<double> boundaries_;  // S_1 .. S_{c-1}
};

/// rho*f(x,y); piecewise-constant lookup with half-open block intervals.
inline double kernel_value(const SbmKernel& k, double x, double y) {
  return k.value(x, y);
}

/// Eigenvalues of the integral operator with kernel f (without the rho
/// scale), descending.
///
/// For block-constant kernels the eigenfunctions are block-constant, so the
/// operator spectrum reduces exactly to the c x c symmetric matrix
/// M_ij = f_ij * sqrt(s_i s_j); no discretization is involved.
inline Spectrum operator_eigenvalues(const SbmKernel& k) {
  const int c = k.communities();
  Eigen::MatrixXd m(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) {
      const double f = (i == j) ? k.p()(i) : k.q_matrix()(i, j);
      m(i, j) = f * std::sqrt(k.s()(i) * k.s()(j));
    }
  return detail::symmetric_eigenvalues(m);
}

/// Block-diagonal kernel whose operator eigenvalues equal `theta`:
/// p_i = theta_i / s_i and Q = 0.
inline SbmKernel kernel_from_target_eigenvalues(const Spectrum& theta,
                                                Eigen::VectorXd s, double rho) {
  const int c = theta.size();
  if (c < 1) throw ArgumentError("kernel_from_target_eigenvalues: empty target");
  if (s.size() != c)
    throw ArgumentError("kernel_from_target_eigenvalues: geometry size mismatch");
  for (int i = 0; i < c; ++i) {
    if (!(theta[i] > 0.0))
      throw ArgumentError("kernel_from_target_eigenvalues: targets must be positive");
    if (i > 0 && !(theta[i] < theta[i - 1]))
      throw ArgumentError("kernel_from_target_eigenvalues: targets must be distinct and descending");
  }
  Eigen::VectorXd p(c);
  for (int i = 0; i < c; ++i) {
    p(i) = theta[i] / s(i);
    if (rho * p(i) > 1.0)
      throw ArgumentError("kernel_from_target_eigenvalues: rho*theta_i/s_i exceeds 1 (infeasible)");
  }
  return SbmKernel(rho, std::move(s), std::move(p), Eigen::MatrixXd::Zero(c, c));
}

/// Result of tying the shared cross density to ||f||_1 = 1.
struct CrossDensity {
  double q = 0.0;
  bool feasible = true;  // false when q had to be clamped at 0
};

/// The single q making ||f(.,.; p, Q, s)||_1 = 1 with all off-diagonal
/// blocks equal: q = (1 - sum_i p_i s_i^2) / (1 - sum_i s_i^2). Both (i,j)
/// and (j,i) blocks count toward the L1 mass.
inline CrossDensity normalize_cross_density(const Eigen::VectorXd& s,
                                            const Eigen::VectorXd& p) {
  if (s.size() != p.size() || s.size() < 1)
    throw ArgumentError("normalize_cross_density: size mismatch");
  const double diag_mass = (p.array() * s.array().square()).sum();
  const double off_area = 1.0 - s.array().square().sum();
  if (off_area <= 1e-15) {
    // Single community: no cross blocks exist, q = 0; flag unless the
    // diagonal already carries unit mass.
    return {0.0, std::abs(diag_mass - 1.0) <= 1e-12};
  }
  const double q = (1.0 - diag_mass) / off_area;
  if (q < 0.0) return {0.0, false};
  return {q, true};
}

/// First-order estimate of the expected extreme adjacency eigenvalues of
/// graphs drawn from the kernel measure: n * rho * lambda(L_f).
inline Spectrum expected_extreme_eigenvalues(const SbmKernel& k, int n) {
  if (n < 2) throw ArgumentError("expected_extreme_eigenvalues: n must be at least 2");
  Spectrum lf = operator_eigenvalues(k);
  return Spectrum(static_cast<double>(n) * k.rho() * lf.values);
}

}  // namespace spectral_frechet
