#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "spectral_frechet/errors.hpp"
#include "spectral_frechet/frechet_mean.hpp"
#include "spectral_frechet/graph.hpp"
#include "spectral_frechet/spectrum.hpp"

namespace spectral_frechet {

/// Paired (t_k, G^(k)) observations for graph-valued regression. Requires
/// N >= 2 equal-size graphs and a covariate with positive sample variance.
struct RegressionDataset {
  std::vector<double> t_values;
  std::vector<Graph> graphs;

  RegressionDataset(std::vector<double> ts, std::vector<Graph> gs)
      : t_values(std::move(ts)), graphs(std::move(gs)) {
    if (t_values.size() != graphs.size())
      throw ArgumentError("RegressionDataset: t and graph counts differ");
    if (t_values.size() < 2) throw ArgumentError("RegressionDataset: needs N >= 2");
    detail::check_sample(graphs);
  }

  std::size_t size() const { return graphs.size(); }
  int vertex_count() const { return graphs.front().vertex_count(); }
};

namespace detail {

struct CovariateStats {
  double mean = 0.0;
  double variance = 0.0;  // biased, 1/N
};

inline CovariateStats covariate_stats(const std::vector<double>& t_values) {
  const double n = static_cast<double>(t_values.size());
  double mean = 0.0;
  for (const double t : t_values) mean += t;
  mean /= n;
  double var = 0.0;
  for (const double t : t_values) var += (t - mean) * (t - mean);
  var /= n;
  return {mean, var};
}

}  // namespace detail

/// Linear Frechet regression weights s_k(t) = 1 + (t_k - T)(t - T)/V, with T
/// the sample mean and V the biased sample variance of the covariate.
/// Weights average to exactly 1; they may be negative when extrapolating.
inline std::vector<double> regression_weights(const std::vector<double>& t_values,
                                              double t) {
  if (t_values.size() < 2)
    throw ArgumentError("regression_weights: needs at least two observations");
  const auto [mean, variance] = detail::covariate_stats(t_values);
  if (!(variance > 0.0))
    throw ArgumentError("regression_weights: covariate variance is zero");
  std::vector<double> weights(t_values.size());
  for (std::size_t k = 0; k < t_values.size(); ++k)
    weights[k] = 1.0 + (t_values[k] - mean) * (t - mean) / variance;
  return weights;
}

namespace detail {

/// Weighted per-index average of descending spectra. Negative weights can
/// disorder the result, so it is re-sorted.
inline Spectrum weighted_mean_of(const std::vector<Spectrum>& spectra,
                                 const std::vector<double>& weights, int c) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(c);
  for (std::size_t k = 0; k < spectra.size(); ++k)
    acc += weights[k] * spectra[k].values.head(c);
  acc /= static_cast<double>(spectra.size());
  return Spectrum::sorted_descending(std::move(acc));
}

}  // namespace detail

/// (1/N) sum_k s_k(t) sigma_c(A^(k)), re-sorted descending — the relaxed
/// minimizer of the weighted Frechet objective at covariate value t.
inline Spectrum weighted_mean_spectrum(const RegressionDataset& data, double t, int c) {
  if (c < 1 || c > data.vertex_count())
    throw ArgumentError("weighted_mean_spectrum: c out of range");
  const std::vector<double> weights = regression_weights(data.t_values, t);
  std::vector<Spectrum> spectra(data.size());
  parallel_for(data.size(),
               [&](std::size_t k) { spectra[k] = truncated_spectrum(data.graphs[k], c); });
  return detail::weighted_mean_of(spectra, weights, c);
}

/// Estimated regression graph at covariate value t.
struct RegressionResult {
  Graph graph;
  FitReport fit;
  int c = 1;
  double weighted_density = 0.0;
  std::optional<CEstimate> c_estimate;
};

/// Runs the approximate-mean pipeline against the weighted mean spectrum at
/// t, with the average density replaced by the weighted mean density.
inline RegressionResult regress_at(const RegressionDataset& data, double t,
                                   const FitOptions& opts) {
  const int n = data.vertex_count();
  const std::vector<double> weights = regression_weights(data.t_values, t);

  double rho_w = 0.0;
  for (std::size_t k = 0; k < data.size(); ++k)
    rho_w += weights[k] * density(data.graphs[k]);
  rho_w /= static_cast<double>(data.size());
  // Extrapolated weights can push the weighted density slightly out of
  // (0,1); small excursions are clipped, larger ones are a modeling failure.
  constexpr double kClipTolerance = 0.05;
  if (rho_w <= 0.0) {
    if (rho_w < -kClipTolerance)
      throw NumericError("regress_at: weighted density far below 0");
    rho_w = detail::kProbFloor;
  } else if (rho_w >= 1.0) {
    if (rho_w > 1.0 + kClipTolerance)
      throw NumericError("regress_at: weighted density far above 1");
    rho_w = 1.0 - detail::kProbFloor;
  }

  const std::vector<Spectrum> spectra = adjacency_spectra(data.graphs);
  Eigen::VectorXd weighted_full = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < data.size(); ++k)
    weighted_full += weights[k] * spectra[k].values;
  weighted_full /= static_cast<double>(data.size());

  detail::PipelineInputs in = detail::resolve_pipeline_inputs(weighted_full, rho_w, opts);
  FrechetMeanResult mean = detail::finish_pipeline(std::move(in), n, opts);
  return RegressionResult{std::move(mean.mean_graph), std::move(mean.fit), mean.c,
                          rho_w, std::move(mean.c_estimate)};
}

}  // namespace spectral_frechet
