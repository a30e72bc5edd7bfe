#include "sheet_extremes/tail_stats.hpp"

#include <boost/math/distributions/beta.hpp>

#include <stdexcept>

namespace sheet_extremes {

std::pair<double, double> clopper_pearson(long hits, long n, double confidence) {
  if (n < 1 || hits < 0 || hits > n) throw std::invalid_argument("clopper_pearson: need 0 <= hits <= n, n >= 1");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("clopper_pearson: confidence must be in (0, 1)");
  const double alpha = 1.0 - confidence;
  const double x = static_cast<double>(hits);
  const double nn = static_cast<double>(n);
  double lo = 0.0;
  double hi = 1.0;
  if (hits > 0) lo = boost::math::quantile(boost::math::beta_distribution<double>(x, nn - x + 1.0), alpha / 2.0);
  if (hits < n)
    hi = boost::math::quantile(boost::math::beta_distribution<double>(x + 1.0, nn - x), 1.0 - alpha / 2.0);
  return {lo, hi};
}

TailEstimate make_tail_estimate(double eps, long hits, long n_paths) {
  TailEstimate t;
  t.eps = eps;
  t.hits = hits;
  t.n_paths = n_paths;
  t.p_hat = static_cast<double>(hits) / static_cast<double>(n_paths);
  const auto [lo, hi] = clopper_pearson(hits, n_paths);
  t.ci99_low = lo;
  t.ci99_high = hi;
  return t;
}

}  // namespace sheet_extremes
