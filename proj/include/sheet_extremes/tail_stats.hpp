#pragma once

#include <utility>

namespace sheet_extremes {

struct TailEstimate {
  double eps = 0.0;
  long hits = 0;
  long n_paths = 0;
  double p_hat = 0.0;
  double ci99_low = 0.0;
  double ci99_high = 1.0;
};

/// Exact (Clopper-Pearson) two-sided interval for a binomial proportion.
std::pair<double, double> clopper_pearson(long hits, long n, double confidence = 0.99);

TailEstimate make_tail_estimate(double eps, long hits, long n_paths);

}  // namespace sheet_extremes
