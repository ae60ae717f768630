#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "spectral_frechet/errors.hpp"
#include "spectral_frechet/spectrum.hpp"

namespace spectral_frechet {

inline constexpr double kPi = 3.14159265358979323846;

/// Wigner semicircle density on [-r, r]: s(x; r) = 2 sqrt(r^2 - x^2) / (pi r^2).
inline double semicircle_pdf(double x, double r) {
  if (!(r > 0.0)) throw ArgumentError("semicircle_pdf: radius must be positive");
  if (x <= -r || x >= r) return 0.0;
  return 2.0 / (kPi * r * r) * std::sqrt(r * r - x * x);
}

/// Semicircle CDF: 1/2 + x sqrt(r^2 - x^2) / (pi r^2) + asin(x/r) / pi.
inline double semicircle_cdf(double x, double r) {
  if (!(r > 0.0)) throw ArgumentError("semicircle_cdf: radius must be positive");
  if (x <= -r) return 0.0;
  if (x >= r) return 1.0;
  return 0.5 + x * std::sqrt(r * r - x * x) / (kPi * r * r) + std::asin(x / r) / kPi;
}

namespace detail {

/// Recursive adaptive Simpson with the usual 1/15 Richardson error test.
template <typename F>
double adaptive_simpson_step(const F& f, double a, double b, double fa, double fm,
                             double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
       + adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol, int max_depth = 48) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Inverse semicircle CDF by bisection.
inline double semicircle_quantile(double u, double r) {
  if (u <= 0.0) return -r;
  if (u >= 1.0) return r;
  double lo = -r, hi = r;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (semicircle_cdf(mid, r) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

struct OrderStatMoments {
  double mean = 0.0;
  double std_dev = 0.0;
};

/// Mean and standard deviation of the j-th largest of m iid semicircle(r)
/// draws (j = 1 is the maximum).
///
/// The order-statistic density m!/((m-j)!(j-1)!) F^(m-j) (1-F)^(j-1) f is
/// integrated by adaptive quadrature at absolute tolerance 1e-8; the
/// combinatorial prefactor is evaluated in log space, which keeps m ~ 600
/// well away from overflow.
inline OrderStatMoments order_stat_moments(double r, int m, int j) {
  if (!(r > 0.0)) throw ArgumentError("order_stat_moments: radius must be positive");
  if (j < 1 || j > m) throw ArgumentError("order_stat_moments: need 1 <= j <= m");

  const double log_prefactor =
      std::lgamma(m + 1.0) - std::lgamma(m - j + 1.0) - std::lgamma(static_cast<double>(j));
  const auto density = [&](double x) -> double {
    const double f = semicircle_pdf(x, r);
    if (f <= 0.0) return 0.0;
    const double cdf = semicircle_cdf(x, r);
    double log_g = log_prefactor + std::log(f);
    if (m - j > 0) {
      if (cdf <= 0.0) return 0.0;
      log_g += (m - j) * std::log(cdf);
    }
    if (j - 1 > 0) {
      if (cdf >= 1.0) return 0.0;
      log_g += (j - 1) * std::log1p(-cdf);
    }
    return std::exp(log_g);
  };

  // For large m the order-statistic density is a narrow spike, which a
  // single adaptive pass over [-r, r] can overlook entirely. F(X_(j)) is
  // Beta(m-j+1, j), so panels pinned at its quantile range put probe points
  // where the mass actually sits; the leftover panels genuinely hold
  // negligible mass and resolve to ~0 immediately.
  const double a_beta = static_cast<double>(m - j + 1);
  const double b_beta = static_cast<double>(j);
  const double u_mean = a_beta / (a_beta + b_beta);
  const double u_sd = std::sqrt(a_beta * b_beta
                                / ((a_beta + b_beta) * (a_beta + b_beta)
                                   * (a_beta + b_beta + 1.0)));
  std::vector<double> knots{-r, r};
  for (const double widths : {-32.0, -16.0, -8.0, -4.0, -2.0, -1.0, 0.0,
                              1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    const double u = u_mean + widths * u_sd;
    if (u > 0.0 && u < 1.0) knots.push_back(detail::semicircle_quantile(u, r));
  }
  std::sort(knots.begin(), knots.end());

  constexpr double kTol = 1e-8;
  const double panel_tol = kTol / static_cast<double>(knots.size());
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    mean += detail::adaptive_simpson([&](double x) { return x * density(x); },
                                     knots[k], knots[k + 1], panel_tol);
    second += detail::adaptive_simpson([&](double x) { return x * x * density(x); },
                                       knots[k], knots[k + 1], panel_tol);
  }
  const double var = std::max(second - mean * mean, 0.0);
  return {mean, std::sqrt(var)};
}

/// Per-rank comparison recorded while scanning for the bulk edge.
struct BulkRankDiag {
  int rank = 0;        // j = 1..K, rank from the top
  double observed = 0.0;
  double expected = 0.0;
  double std_dev = 0.0;
};

struct BulkIterationDiag {
  int i = 0;       // candidate index: bulk modeled as entries i..n
  double radius = 0.0;
  std::vector<BulkRankDiag> ranks;
  bool all_within = false;
};

struct CEstimate {
  int c = 1;
  bool exhausted = false;  // spectrum ran out before the loop settled
  std::vector<BulkIterationDiag> iterations;
};

/// Number of eigenvalues outside the random-matrix bulk.
///
/// Scans i = 1, 2, ...: takes r = lambda_bar(i) as the bulk radius, models
/// lambda_bar(j), j >= i, as iid semicircle(r) draws, and keeps going while
/// any of the next K entries lambda_bar(i+1)..lambda_bar(i+K) deviates from
/// the matching top order statistic of n-i draws by more than one
/// order-statistic standard deviation. Returns max(i-1, 1).
inline CEstimate estimate_c(const Spectrum& full_mean_spectrum, int K) {
  const int n = full_mean_spectrum.size();
  if (K < 1) throw ArgumentError("estimate_c: K must be positive");
  if (n < K + 2) throw ArgumentError("estimate_c: spectrum shorter than K + 2");

  CEstimate result;
  for (int i = 1;; ++i) {
    if (i + K > n) {
      result.c = std::max(i - 1, 1);
      result.exhausted = true;
      return result;
    }
    const double r = full_mean_spectrum[i - 1];
    if (!(r > 0.0)) {
      // Bulk radius collapsed; no semicircle model is possible past here.
      result.c = std::max(i - 1, 1);
      result.exhausted = true;
      return result;
    }
    const int m = n - i;
    BulkIterationDiag diag;
    diag.i = i;
    diag.radius = r;
    bool all_within = true;
    for (int j = 1; j <= K; ++j) {
      const OrderStatMoments mom = order_stat_moments(r, m, j);
      const double observed = full_mean_spectrum[i + j - 1];
      diag.ranks.push_back({j, observed, mom.mean, mom.std_dev});
      all_within = all_within && std::abs(observed - mom.mean) <= mom.std_dev;
    }
    diag.all_within = all_within;
    result.iterations.push_back(std::move(diag));
    if (all_within) {
      result.c = std::max(i - 1, 1);
      return result;
    }
  }
}

}  // namespace spectral_frechet
