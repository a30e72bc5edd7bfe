#pragma once

// Truncated summation of non-negative series with a certified tail.
//
// Terms are grouped into shells (single indices for 1-D series, diagonals or
// square rings for double series). Summation proceeds shell by shell in a
// fixed order; at checkpoints, once the last few shell sums are non-increasing,
// a caller-supplied tail bound is evaluated and summation stops when it falls
// below tol * partial_sum.

#include <functional>
#include <limits>
#include <utility>

namespace sheet_extremes {

struct SeriesOptions {
  double tol = 1e-8;
  long max_terms = 0;  // 0: caller's default budget
  long min_terms = 0;  // keep summing at least this many terms
};

struct SeriesValue {
  double partial_sum = 0.0;
  long terms_used = 0;
  double tail_estimate = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool decaying = false;  // last probed shell sums were non-increasing

  /// Upper bound on the full sum (infinite when not converged).
  double bound() const { return partial_sum + tail_estimate; }
};

struct ShellSum {
  double sum = 0.0;
  long terms = 0;
};

/// Sums shells 0, 1, 2, ... until tail(S) <= tol * partial, where tail(S)
/// bounds the contribution of all shells after S (+inf when unusable).
/// `divergent` short-circuits a series already known to diverge.
SeriesValue sum_shells(const std::function<ShellSum(long)>& shell,
                       const std::function<double(long)>& tail, const SeriesOptions& opts,
                       long default_budget, bool divergent = false);

/// Upper bound on exp(log_scale) * sum_{k > K} (ln(kappa k + e))^a (kappa k + e)^{-b}
/// by comparison with the integral from K; uses the upper incomplete gamma
/// function after substituting y = ln(kappa x + e). Returns +inf when b <= 1
/// or when the summand is not yet decreasing at kappa K.
double log_power_tail(double log_scale, double a, double b, double kappa, long K);

/// Log of the same tail bound (-inf for a zero tail, +inf when unusable).
double log_power_tail_log(double log_scale, double a, double b, double kappa, long K);

}  // namespace sheet_extremes
