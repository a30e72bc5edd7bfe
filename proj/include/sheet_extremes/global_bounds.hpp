#pragma once

// Tail bounds for normalized sups over unbounded domains:
//   * R^2_+ with envelope (t1 v t2)^{H1+H2} c(t1 v t2) and a growth schedule b_k,
//   * [1, inf)^2 with envelope t1^{H1} t2^{H2} phi(t),
// each as the raw series form and its closed relaxation, plus the two worked
// examples evaluated from their own closed formulas.

#include "sheet_extremes/bounds.hpp"
#include "sheet_extremes/field_model.hpp"
#include "sheet_extremes/series.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace sheet_extremes {

/// Strictly increasing schedule b_k = r^k (b_0 = 1). Stored in log form so
/// that k in the hundreds of thousands does not overflow.
class GrowthSchedule {
 public:
  static GrowthSchedule geometric(double ratio);
  /// b_k = e^k
  static GrowthSchedule exponential();

  double ratio() const { return ratio_; }
  double log_ratio() const { return log_ratio_; }
  double log_b(long k) const { return static_cast<double>(k) * log_ratio_; }
  double operator()(long k) const { return std::exp(log_b(k)); }
  std::string describe() const;

 private:
  explicit GrowthSchedule(double ratio);
  double ratio_;
  double log_ratio_;
};

/// Envelope correction c: (0, inf) -> (0, inf).
class Normalizer {
 public:
  enum class Kind { loglog, constant };

  /// c(t) = sqrt(ln(|ln t| + e))
  static Normalizer loglog();
  /// c(t) = value; violates c -> inf, kept to exercise the non-decay path.
  static Normalizer constant(double value);

  Kind kind() const { return kind_; }
  double operator()(double t) const { return at_log(std::log(t)); }
  double at_log(double log_t) const;
  std::string describe() const;

 private:
  Normalizer(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

/// Weight phi on [1, inf)^2, increasing in each coordinate.
class WeightFn {
 public:
  enum class Kind { phi1, phi2, constant };

  /// phi1(x) = s sqrt(ln(log2(x1 x2) + e)),  phi2(x) = s sqrt(ln(e + log2 x1) + ln(e + log2 x2)).
  /// Without delta the scale s is 1 (phi1(1,1) = 1); with delta it is sqrt(2 + delta).
  static WeightFn phi1(std::optional<double> delta = std::nullopt);
  static WeightFn phi2(std::optional<double> delta = std::nullopt);
  static WeightFn constant(double value);

  Kind kind() const { return kind_; }
  double scale_sq() const { return scale_sq_; }
  double operator()(double x1, double x2) const;
  /// phi(2^n, 2^m)^2 without going through the powers of two.
  double dyadic_sq(long n, long m) const;
  double at_one() const { return std::sqrt(dyadic_sq(0, 0)); }
  std::string describe() const;

 private:
  WeightFn(Kind kind, double scale_sq) : kind_(kind), scale_sq_(scale_sq) {}
  Kind kind_;
  double scale_sq_;
};

struct MConstant {
  double value = 0.0;
  long argmin = 0;
  bool stabilized = true;  // false if the last quarter of probes lowered the infimum
};

/// M = inf_k (b_k / b_{k+1})^{H1+H2} c(b_k) over k in [0, k_probe]. Throws
/// std::domain_error when the infimum is not positive.
MConstant schedule_m_constant(const HurstPair& h, const GrowthSchedule& sched, const Normalizer& c,
                              long k_probe = 64);

/// w_k = (b_k / b_{k+1})^{H1+H2} c(b_k)
double schedule_weight(const HurstPair& h, const GrowthSchedule& sched, const Normalizer& c, long k);

struct GlobalBound {
  BoundResult result;
  SeriesValue series;
};

/// Series bound on P{ sup_{R^2_+} |X(t)| / ((t1 v t2)^{H1+H2} c(t1 v t2)) > eps }.
GlobalBound global_bound_thm35(const HurstPair& h, const GrowthSchedule& sched, const Normalizer& c,
                               double eps, const SeriesOptions& opts = {});
/// Closed relaxation using u eps^2 + v_k <= u eps^2 v_k.
GlobalBound global_bound_cor36(const HurstPair& h, const GrowthSchedule& sched, const Normalizer& c,
                               double eps, const SeriesOptions& opts = {});
/// b_k = e^k, loglog normalizer, from the worked closed form.
GlobalBound example1_bound(const HurstPair& h, double eps, const SeriesOptions& opts = {});

/// Series bound on P{ sup_{[1,inf)^2} |X(t)| / (t1^{H1} t2^{H2} phi(t)) > eps }.
GlobalBound quadrant_bound_thm47(const HurstPair& h, const WeightFn& phi, double eps,
                                 const SeriesOptions& opts = {});
/// Relaxation with e^{-u eps^2} pulled out of the double series, where
/// u = C2 theta / 2 and v = 2 phi^2 / theta for a reference level
/// theta <= phi(1,1)^2 (default min(phi(1,1)^2, 1)).
GlobalBound quadrant_bound_cor48(const HurstPair& h, const WeightFn& phi, double eps,
                                 const SeriesOptions& opts = {},
                                 std::optional<double> reference_sq = std::nullopt);
/// The two worked closed forms (phi1 or phi2 without the sqrt(2 + delta) factor).
GlobalBound example2_bounds(const HurstPair& h, WeightFn::Kind which, double eps,
                            const SeriesOptions& opts = {});

/// Constants of the quadrant bounds.
double quadrant_c1(const HurstPair& h);
double quadrant_c2(const HurstPair& h);
/// u = 3 M^2 / (4 (4^{1-H} + 3))
double cor36_u(const HurstPair& h, double m);
double cor48_reference_sq(const WeightFn& phi);
/// u = C2 theta / 2
double cor48_u(const HurstPair& h, double reference_sq);

/// Smallest eps above which the family's bound is valid: the stated threshold
/// combined with convergence of its series. +inf if no eps qualifies.
double thm35_threshold(const HurstPair& h, const GrowthSchedule& sched, const Normalizer& c);
double cor36_threshold(const HurstPair& h, const GrowthSchedule& sched, const Normalizer& c);
double thm47_threshold(const HurstPair& h, const WeightFn& phi);
double cor48_threshold(const HurstPair& h, const WeightFn& phi,
                       std::optional<double> reference_sq = std::nullopt);
double example2_threshold(const HurstPair& h, WeightFn::Kind which);

}  // namespace sheet_extremes
