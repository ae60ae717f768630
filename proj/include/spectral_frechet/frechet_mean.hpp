#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "spectral_frechet/bulk_estimator.hpp"
#include "spectral_frechet/errors.hpp"
#include "spectral_frechet/graph.hpp"
#include "spectral_frechet/parallel.hpp"
#include "spectral_frechet/random_graphs.hpp"
#include "spectral_frechet/rng.hpp"
#include "spectral_frechet/sbm_kernel.hpp"
#include "spectral_frechet/spectrum.hpp"

namespace spectral_frechet {

/// Hyperparameters of the kernel fit and of the end-to-end mean pipeline.
struct FitOptions {
  int max_iters = 500;
  double rel_tol = 1e-4;
  double fd_step = 1e-4;     // centered-difference step per p coordinate
  double step_size = 0.1;    // initial gradient step, adapted by backtracking
  int n_tilde = 5;           // sample size for the set mean graph
  RngSeed seed{42};          // default seed; all randomness derives from it
  int k_bulk = 5;            // K used by estimate_c
  std::optional<int> c_override;
  std::optional<Eigen::VectorXd> s_override;
};

/// Outcome of the kernel-fitting optimization.
struct FitReport {
  SbmKernel kernel;
  Spectrum target;                    // length c, what n*rho*lambda(L_f) chased
  std::vector<double> objective_trace;  // initial value, then each accepted step
  int iterations = 0;
  bool converged = false;
  bool negative_target = false;       // some target entry was <= 0
  bool normalization_clamped = false; // q clamp active at the final iterate
  int restarts = 0;

  /// Fitted estimate n*rho*lambda_i(L_f) for the n the fit was run with.
  Spectrum fitted_extremes(int n) const { return expected_extreme_eigenvalues(kernel, n); }
};

/// Geometry used when none is supplied: one community of size 1/2 and c-1
/// equal communities sharing the other half.
inline Eigen::VectorXd default_geometry(int c) {
  if (c < 1) throw ArgumentError("default_geometry: c must be positive");
  Eigen::VectorXd s(c);
  if (c == 1) {
    s << 1.0;
    return s;
  }
  s(0) = 0.5;
  for (int i = 1; i < c; ++i) s(i) = 0.5 / (c - 1);
  return s;
}

namespace detail {

/// Box for p imposed by the kernel being an edge-probability field:
/// rho*p_i clipped into [1e-6, 1].
inline constexpr double kProbFloor = 1e-6;

inline Eigen::VectorXd clip_to_box(Eigen::VectorXd p, double rho) {
  for (Eigen::Index i = 0; i < p.size(); ++i)
    p(i) = std::clamp(p(i), kProbFloor / rho, 1.0 / rho);
  return p;
}

struct FitEvaluation {
  double objective = 0.0;
  double q = 0.0;
  bool q_clamped = false;
  bool normalization_feasible = true;  // ||f||_1 = 1 held before any clipping
};

/// Objective of Alg. "fit": q is re-tied to p through the L1 normalization
/// (clamped into the probability box) before every evaluation, and the
/// kernel eigenvalues come from the exact c x c reduction.
inline FitEvaluation evaluate_fit(const Spectrum& target, const Eigen::VectorXd& s,
                                  double rho, int n, const Eigen::VectorXd& p) {
  const int c = static_cast<int>(s.size());
  const CrossDensity cross = normalize_cross_density(s, p);
  double q = cross.q;
  bool clamped = !cross.feasible;
  // With one community there are no cross blocks; the L1 constraint on q is
  // vacuous rather than infeasible.
  bool feasible = c == 1 || cross.feasible;
  if (c > 1) {
    const double lo = kProbFloor / rho;
    const double hi = 1.0 / rho;
    const double clipped = std::clamp(q, lo, hi);
    clamped = clamped || clipped != q;
    q = clipped;
  } else {
    q = 0.0;
    clamped = false;
  }

  Eigen::MatrixXd m(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j)
      m(i, j) = (i == j ? p(i) : q) * std::sqrt(s(i) * s(j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lf = solver.eigenvalues().reverse();

  double objective = 0.0;
  for (int i = 0; i < c; ++i) {
    const double diff = n * rho * lf(i) - target[i];
    objective += diff * diff;
  }
  return {objective, q, clamped, feasible};
}

}  // namespace detail

/// Fit objective sum_i |n rho lambda_i(L_f) - target_i|^2 at within-density
/// vector p (q tied by normalize_cross_density, clamped to the probability
/// box). Exposed for gradient checks.
inline double fit_objective(const Spectrum& target, const Eigen::VectorXd& s,
                            double rho_bar, int n, const Eigen::VectorXd& p) {
  return detail::evaluate_fit(target, s, rho_bar, n, p).objective;
}

/// Centered-difference gradient of fit_objective in p, step h per coordinate.
inline Eigen::VectorXd fit_objective_gradient(const Spectrum& target,
                                              const Eigen::VectorXd& s, double rho_bar,
                                              int n, const Eigen::VectorXd& p, double h) {
  Eigen::VectorXd grad(p.size());
  Eigen::VectorXd probe = p;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    probe(i) = p(i) + h;
    const double hi = fit_objective(target, s, rho_bar, n, probe);
    probe(i) = p(i) - h;
    const double lo = fit_objective(target, s, rho_bar, n, probe);
    probe(i) = p(i);
    grad(i) = (hi - lo) / (2.0 * h);
  }
  return grad;
}

namespace detail {

struct DescentRun {
  Eigen::VectorXd p;
  double q = 0.0;
  bool q_clamped = false;
  bool normalization_ever_feasible = true;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

inline DescentRun run_projected_descent(const Spectrum& target, const Eigen::VectorXd& s,
                                        double rho, int n, const FitOptions& opts,
                                        std::uint64_t init_seed,
                                        const Eigen::VectorXd* start = nullptr) {
  const int c = static_cast<int>(s.size());

  // Default start: p uniform on [0.1, 0.9]/rho, clipped into the box.
  Eigen::VectorXd p(c);
  if (start) {
    p = *start;
  } else {
    rng::Xoshiro256 gen(init_seed);
    for (int i = 0; i < c; ++i) p(i) = (0.1 + 0.8 * gen.uniform()) / rho;
  }
  p = clip_to_box(std::move(p), rho);

  DescentRun run;
  FitEvaluation eval = evaluate_fit(target, s, rho, n, p);
  run.trace.push_back(eval.objective);
  bool feasible_seen = eval.normalization_feasible;

  const auto reduced_gradient_norm = [&](const Eigen::VectorXd& at,
                                         const Eigen::VectorXd& grad) {
    // Coordinates pinned at the box faces do not count: the projection
    // annihilates any further push outward.
    const double lo = kProbFloor / rho;
    const double hi = 1.0 / rho;
    double sq = 0.0;
    for (int i = 0; i < c; ++i) {
      if (at(i) <= lo && grad(i) > 0.0) continue;
      if (at(i) >= hi && grad(i) < 0.0) continue;
      sq += grad(i) * grad(i);
    }
    return std::sqrt(sq);
  };

  double step = opts.step_size;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    run.iterations = iter + 1;
    const Eigen::VectorXd grad =
        fit_objective_gradient(target, s, rho, n, p, opts.fd_step);

    // Backtracking line search: halve until the objective decreases,
    // capped at 30 halvings.
    double trial = step;
    Eigen::VectorXd candidate;
    FitEvaluation cand_eval;
    bool accepted = false;
    for (int halving = 0; halving <= 30; ++halving) {
      candidate = clip_to_box(p - trial * grad, rho);
      cand_eval = evaluate_fit(target, s, rho, n, candidate);
      if (cand_eval.objective < eval.objective) {
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) {
      // Stalled; declare convergence only if the (projected) slope vanished.
      run.converged = reduced_gradient_norm(p, grad)
                      <= 1e-3 * (1.0 + std::abs(eval.objective));
      break;
    }

    const double denom = std::max(std::sqrt(p.squaredNorm() + eval.q * eval.q), 1e-300);
    const double change =
        std::sqrt((candidate - p).squaredNorm()
                  + (cand_eval.q - eval.q) * (cand_eval.q - eval.q)) / denom;
    p = candidate;
    eval = cand_eval;
    feasible_seen = feasible_seen || eval.normalization_feasible;
    run.trace.push_back(eval.objective);
    step = std::min(trial * 2.0, opts.step_size);

    if (change < opts.rel_tol) {
      const Eigen::VectorXd final_grad =
          fit_objective_gradient(target, s, rho, n, p, opts.fd_step);
      run.converged = reduced_gradient_norm(p, final_grad)
                      <= 1e-3 * (1.0 + std::abs(eval.objective));
      break;
    }
  }

  run.p = std::move(p);
  run.q = eval.q;
  run.q_clamped = eval.q_clamped;
  run.normalization_ever_feasible = feasible_seen;
  // A kernel that could never satisfy ||f||_1 = 1 is best-effort only.
  if (!feasible_seen) run.converged = false;
  return run;
}

}  // namespace detail

/// Fits the canonical kernel whose scaled operator eigenvalues
/// n*rho_bar*lambda(L_f) track the target spectrum, by projected gradient
/// descent on the within-densities p with q tied to p after every step.
///
/// The sorted-eigenvalue objective has spurious basins (block/eigenvalue
/// pairings that cannot reach the target), so a single random start is not
/// reliable. The fit multi-starts: the random initialization first, then a
/// start built from the block-diagonal construction p_i = target_i /
/// (n rho s_i), then fresh random draws, keeping the best run and stopping
/// early once the objective is negligible against the target scale.
inline FitReport fit_kernel(const Spectrum& target, const Eigen::VectorXd& s,
                            double rho_bar, int n, const FitOptions& opts) {
  const int c = target.size();
  if (c < 1) throw ArgumentError("fit_kernel: empty target");
  if (static_cast<int>(s.size()) != c)
    throw ArgumentError("fit_kernel: target and geometry lengths differ");
  if (!(rho_bar > 0.0 && rho_bar < 1.0))
    throw ArgumentError("fit_kernel: rho_bar must lie in (0,1)");
  if (n < 2) throw ArgumentError("fit_kernel: n must be at least 2");
  bool negative_target = false;
  for (int i = 0; i < c; ++i) {
    if (!std::isfinite(target[i]))
      throw ArgumentError("fit_kernel: target must be finite");
    negative_target = negative_target || target[i] <= 0.0;
  }

  const double goal = 1e-8 * std::max(1.0, target.values.squaredNorm());
  std::optional<Eigen::VectorXd> guided;
  if (!negative_target) {
    Eigen::VectorXd g(c);
    for (int i = 0; i < c; ++i) g(i) = target[i] / (n * rho_bar * s(i));
    guided = detail::clip_to_box(std::move(g), rho_bar);
  }

  constexpr int kMaxStarts = 6;
  std::optional<detail::DescentRun> best;
  int attempts = 0;
  for (int attempt = 0; attempt < kMaxStarts; ++attempt) {
    detail::DescentRun run =
        (attempt == 1 && guided)
            ? detail::run_projected_descent(target, s, rho_bar, n, opts, 0, &*guided)
            : detail::run_projected_descent(
                  target, s, rho_bar, n, opts,
                  derive_seed(opts.seed, "fit-init", attempt), nullptr);
    ++attempts;
    const bool better =
        !best || run.trace.back() < best->trace.back()
        || (run.trace.back() == best->trace.back() && run.converged && !best->converged);
    if (better) best = std::move(run);
    if (best->converged && best->trace.back() <= goal) break;
  }
  const int restarts = attempts - 1;

  Eigen::MatrixXd q_matrix = Eigen::MatrixXd::Constant(c, c, best->q);
  q_matrix.diagonal().setZero();
  return FitReport{
      SbmKernel(rho_bar, s, best->p, std::move(q_matrix)),
      target,
      std::move(best->trace),
      best->iterations,
      best->converged,
      negative_target,
      best->q_clamped,
      restarts,
  };
}

/// Index of the sample member minimizing the mean squared truncated
/// distance to the sample; ties go to the lowest index.
inline std::size_t set_mean_index(std::span<const Graph> graphs, int c) {
  detail::check_sample(graphs);
  if (c < 1 || c > graphs.front().vertex_count())
    throw ArgumentError("set_mean_graph: c out of range");

  std::vector<Spectrum> spectra(graphs.size());
  parallel_for(graphs.size(),
               [&](std::size_t k) { spectra[k] = truncated_spectrum(graphs[k], c); });

  std::size_t best = 0;
  double best_objective = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    double objective = 0.0;
    for (std::size_t l = 0; l < graphs.size(); ++l)
      objective += (spectra[k].values - spectra[l].values).squaredNorm();
    objective /= static_cast<double>(graphs.size());
    if (objective < best_objective) {
      best_objective = objective;
      best = k;
    }
  }
  return best;
}

inline Graph set_mean_graph(std::span<const Graph> graphs, int c) {
  return graphs[set_mean_index(graphs, c)];
}

/// End-to-end result of the approximate sample Frechet mean pipeline.
struct FrechetMeanResult {
  Graph mean_graph;
  FitReport fit;
  int c = 1;
  double rho_bar = 0.0;
  std::optional<CEstimate> c_estimate;  // present unless c was overridden
};

namespace detail {

struct PipelineInputs {
  double rho_bar = 0.0;
  int c = 1;
  Eigen::VectorXd s;
  Spectrum target;
  std::optional<CEstimate> c_estimate;
};

/// Shared head of the mean and regression pipelines: choose c and s, build
/// the target spectrum.
///
/// `per_index_mean` is the (possibly weighted) entrywise average of full
/// spectra, index-aligned and not necessarily monotone. The bulk scan sees
/// it sorted; the target is the sorted truncation of the per-index average,
/// which for plain averaging is just its head.
inline PipelineInputs resolve_pipeline_inputs(const Eigen::VectorXd& per_index_mean,
                                              double rho_bar, const FitOptions& opts) {
  PipelineInputs in;
  in.rho_bar = rho_bar;
  if (opts.c_override) {
    if (*opts.c_override < 1 || *opts.c_override > per_index_mean.size())
      throw ArgumentError("c override out of range");
    in.c = *opts.c_override;
  } else {
    CEstimate est = estimate_c(Spectrum::sorted_descending(per_index_mean), opts.k_bulk);
    in.c = est.c;
    in.c_estimate = std::move(est);
  }
  if (opts.s_override) {
    if (static_cast<int>(opts.s_override->size()) != in.c)
      throw ArgumentError("s override length must equal c");
    in.s = *opts.s_override;
  } else {
    in.s = default_geometry(in.c);
  }
  in.target = Spectrum::sorted_descending(per_index_mean.head(in.c));
  return in;
}

inline FrechetMeanResult finish_pipeline(detail::PipelineInputs in, int n,
                                         const FitOptions& opts) {
  FitReport fit = fit_kernel(in.target, in.s, in.rho_bar, n, opts);

  const int n_tilde = std::max(opts.n_tilde, 1);
  std::vector<Graph> draws;
  draws.reserve(n_tilde);
  for (int k = 0; k < n_tilde; ++k)
    draws.push_back(sample_kernel_graph(fit.kernel, n,
                                        RngSeed{derive_seed(opts.seed, "set-mean", k)}));
  const std::size_t pick = set_mean_index(draws, in.c);

  return FrechetMeanResult{std::move(draws[pick]), std::move(fit), in.c, in.rho_bar,
                           std::move(in.c_estimate)};
}

}  // namespace detail

/// Approximate sample Frechet mean of a graph sample under the truncated
/// adjacency spectral pseudometric: estimates c, fits the canonical kernel
/// to the sample mean spectrum, then returns the set mean of n_tilde draws
/// from the fitted measure.
inline FrechetMeanResult approximate_frechet_mean(std::span<const Graph> sample,
                                                  const FitOptions& opts) {
  detail::check_sample(sample);
  const int n = sample.front().vertex_count();
  double rho_sum = 0.0;
  for (const Graph& g : sample) {
    const double rho = density(g);
    if (!(rho > 0.0 && rho < 1.0))
      throw ArgumentError("approximate_frechet_mean: graph densities must lie in (0,1)");
    rho_sum += rho;
  }
  const double rho_bar = rho_sum / static_cast<double>(sample.size());

  const std::vector<Spectrum> spectra = adjacency_spectra(sample);
  const Spectrum full_mean = detail::mean_of(spectra, n);

  detail::PipelineInputs in =
      detail::resolve_pipeline_inputs(full_mean.values, rho_bar, opts);
  return detail::finish_pipeline(std::move(in), n, opts);
}

// --- Exhaustive oracle for tiny instances -------------------------------

namespace detail {

inline int pair_count(int n) { return n * (n - 1) / 2; }

/// Graph on n vertices whose edge set is the bit pattern of `code` over the
/// (u < v) lexicographic pair order.
inline Graph graph_from_code(int n, std::uint64_t code) {
  Graph g(n);
  int bit = 0;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v, ++bit)
      if ((code >> bit) & 1u) g.add_edge(u, v);
  return g;
}

inline bool edge_set_lex_less(const Graph& a, const Graph& b) {
  return a.edges() < b.edges();
}

}  // namespace detail

struct BruteForceResult {
  Graph graph;
  double objective = 0.0;
};

/// Exact sample Frechet mean by enumerating all 2^(n(n-1)/2) graphs.
/// Restricted to n <= 5; ties break toward the lexicographically smallest
/// edge set.
inline BruteForceResult brute_force_frechet_mean(std::span<const Graph> sample, int c) {
  detail::check_sample(sample);
  const int n = sample.front().vertex_count();
  if (n > 5)
    throw ArgumentError("brute_force_frechet_mean: refused for n > 5 (2^(n(n-1)/2) graphs)");
  if (c < 1 || c > n) throw ArgumentError("brute_force_frechet_mean: c out of range");

  std::vector<Spectrum> sample_spectra(sample.size());
  for (std::size_t k = 0; k < sample.size(); ++k)
    sample_spectra[k] = truncated_spectrum(sample[k], c);

  const std::uint64_t codes = std::uint64_t{1} << detail::pair_count(n);
  std::optional<Graph> best;
  double best_objective = std::numeric_limits<double>::infinity();
  for (std::uint64_t code = 0; code < codes; ++code) {
    Graph g = detail::graph_from_code(n, code);
    const Spectrum sigma = truncated_spectrum(g, c);
    double objective = 0.0;
    for (const Spectrum& sk : sample_spectra)
      objective += (sigma.values - sk.values).squaredNorm();
    objective /= static_cast<double>(sample.size());
    if (objective < best_objective
        || (objective == best_objective && best && detail::edge_set_lex_less(g, *best))) {
      best_objective = objective;
      best = std::move(g);
    }
  }
  return BruteForceResult{std::move(*best), best_objective};
}

}  // namespace spectral_frechet
