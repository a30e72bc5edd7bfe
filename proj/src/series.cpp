#include "sheet_extremes/series.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <array>
#include <cmath>
#include <stdexcept>

namespace sheet_extremes {

namespace {

constexpr int kDecreaseWindow = 8;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_checkpoint(long shell) {
  const long n = shell + 1;
  return (n & (n - 1)) == 0 || n % 256 == 0;
}

/// log Gamma(s, x) for s > 0, x >= 0.
double log_upper_gamma(double s, double x) {
  const double q = boost::math::gamma_q(s, x);
  if (q > 1e-280) return std::log(q) + boost::math::lgamma(s);
  // Far tail: Gamma(s,x) <= x^{s-1} e^{-x} x / (x - s + 1) for s >= 1, x > s - 1,
  // and <= x^{s-1} e^{-x} for s < 1.
  if (s < 1.0) return (s - 1.0) * std::log(x) - x;
  if (x <= s - 1.0) throw std::logic_error("log_upper_gamma: underflow outside asymptotic range");
  return (s - 1.0) * std::log(x) - x + std::log(x / (x - s + 1.0));
}

}  // namespace

double log_power_tail_log(double log_scale, double a, double b, double kappa, long K) {
  if (!(kappa > 0.0)) throw std::invalid_argument("log_power_tail: kappa must be > 0");
  if (!(b > 1.0)) return kInf;
  const double y = std::log(kappa * static_cast<double>(K) + std::exp(1.0));
  if (a > 0.0 && y < a / b) return kInf;  // summand still increasing somewhere past K
  const double s = a + 1.0;
  return log_scale - std::log(kappa) + log_upper_gamma(s, (b - 1.0) * y) -
         s * std::log(b - 1.0);
}

double log_power_tail(double log_scale, double a, double b, double kappa, long K) {
  return std::exp(log_power_tail_log(log_scale, a, b, kappa, K));
}

SeriesValue sum_shells(const std::function<ShellSum(long)>& shell,
                       const std::function<double(long)>& tail, const SeriesOptions& opts,
                       long default_budget, bool divergent) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("series tolerance must be > 0");
  const long budget = opts.max_terms > 0 ? opts.max_terms : default_budget;

  SeriesValue out;
  std::array<double, kDecreaseWindow> recent{};
  long seen = 0;

  for (long s = 0;; ++s) {
    const ShellSum sh = shell(s);
    out.partial_sum += sh.sum;
    out.terms_used += sh.terms;
    recent[s % kDecreaseWindow] = sh.sum;
    ++seen;

    if (divergent) {
      out.tail_estimate = kInf;
      out.converged = false;
      return out;
    }

    const bool at_budget = out.terms_used >= budget;
    if (!is_checkpoint(s) && !at_budget) continue;

    bool decreasing = seen >= kDecreaseWindow;
    for (long i = s - kDecreaseWindow + 2; decreasing && i <= s; ++i)
      decreasing = recent[i % kDecreaseWindow] <= recent[(i - 1) % kDecreaseWindow];
    out.decaying = decreasing;

    if (decreasing) {
      const double t = tail(s);
      out.tail_estimate = t;
      if (t <= opts.tol * out.partial_sum && out.terms_used >= opts.min_terms) {
        out.converged = true;
        return out;
      }
    } else {
      out.tail_estimate = kInf;
    }
    if (at_budget) {
      out.converged = false;
      return out;
    }
  }
}

}  // namespace sheet_extremes
