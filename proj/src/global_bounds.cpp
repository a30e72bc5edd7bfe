#include "sheet_extremes/global_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sheet_extremes {

namespace {

constexpr double kE = std::numbers::e;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long kBudget1d = 100000;
constexpr long kBudget2d = 1000000;
constexpr double kSlack = 1e-12;
constexpr long kProbe = 64;

BoundResult start(std::string family, double eps) {
  BoundResult r;
  r.family = std::move(family);
  r.epsilon = eps;
  return r;
}

std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

// 3 / (2 (4^{1-H} + 3))
double thm35_c(const HurstPair& h) {
  return 3.0 / (2.0 * (std::pow(4.0, 1.0 - h.h_min()) + 3.0));
}

void record_series(BoundResult& r, const SeriesValue& s) {
  r.params.emplace_back("series_partial", s.partial_sum);
  r.params.emplace_back("series_tail", s.tail_estimate);
  r.params.emplace_back("series_terms", static_cast<double>(s.terms_used));
  r.params.emplace_back("series_converged", s.converged ? 1.0 : 0.0);
  detail::require(r, "series tail finite", std::isfinite(s.bound()));
}

// sum_k rho_k^a e^{b (1 - rho_k)} with rho_k = ln(kappa k + e) for a growing
// normalizer; the tail bound assumes that shape.
SeriesValue sum_relative_1d(double a, double b, double kappa, const std::function<double(long)>& rho,
                            const SeriesOptions& opts) {
  auto shell = [&](long k) {
    const double r = rho(k);
    return ShellSum{std::exp(a * std::log(r) + b * (1.0 - r)), 1};
  };
  auto tail = [&](long K) { return std::exp(log_power_tail_log(b, a, b, kappa, K)); };
  return sum_shells(shell, tail, opts, kBudget1d);
}

// Double series over (n, m) >= 0 of (G/G00)^Q e^{-b (G - G00)}, where
// G = ln(n+m+e) (phi1, G00 = 1) or ln(n+e) + ln(m+e) (phi2, G00 = 2).
SeriesValue sum_relative_dyadic(WeightFn::Kind kind, double q, double b,
                                const SeriesOptions& opts) {
  if (kind == WeightFn::Kind::phi1) {
    auto shell = [&](long j) {
      const double l = std::log(static_cast<double>(j) + kE);
      const double t = std::exp(q * std::log(l) + b * (1.0 - l));
      return ShellSum{static_cast<double>(j + 1) * t, j + 1};
    };
    // (j+1) <= (j+e), so the diagonal tail is a power tail with exponent b - 1.
    auto tail = [&](long J) { return std::exp(log_power_tail_log(b, q, b - 1.0, 1.0, J)); };
    return sum_shells(shell, tail, opts, kBudget2d);
  }

  // Square shells max(n, m) = J. One-dimensional factors are cached as they
  // are reached, together with running sums of l^0 e and l^Q e.
  std::vector<double> logl;
  std::vector<double> ex;
  double r0 = 0.0;
  double rq = 0.0;
  auto extend = [&](long J) {
    while (static_cast<long>(logl.size()) <= J) {
      const double l = std::log(static_cast<double>(logl.size()) + kE);
      const double e = std::exp(b * (1.0 - l));
      logl.push_back(l);
      ex.push_back(e);
      r0 += e;
      rq += std::exp(q * std::log(l)) * e;
    }
  };
  auto term = [&](long n, long m) {
    return std::exp(q * std::log(0.5 * (logl[n] + logl[m]))) * ex[n] * ex[m];
  };
  auto shell = [&](long J) {
    extend(J);
    double s = term(J, J);
    for (long i = 0; i < J; ++i) s += 2.0 * term(i, J);
    return ShellSum{s, 2 * J + 1};
  };
  auto tail = [&](long J) {
    const double t0 = std::exp(log_power_tail_log(b, 0.0, b, 1.0, J));
    const double tq = std::exp(log_power_tail_log(b, q, b, 1.0, J));
    if (!std::isfinite(t0) || !std::isfinite(tq)) return kInf;
    return tq * (r0 + t0) + t0 * (rq + tq);
  };
  return sum_shells(shell, tail, opts, kBudget2d);
}

// Convergence of the dyadic series needs b > 2 on the diagonal form, b > 1 on the product form.
double dyadic_b_floor(WeightFn::Kind kind) { return kind == WeightFn::Kind::phi1 ? 2.0 : 1.0; }

double g00(WeightFn::Kind kind) { return kind == WeightFn::Kind::phi1 ? 1.0 : 2.0; }

bool grows(const Normalizer& c) { return c.kind() == Normalizer::Kind::loglog; }

}  // namespace

GrowthSchedule::GrowthSchedule(double ratio) : ratio_(ratio), log_ratio_(std::log(ratio)) {
  if (!(ratio > 1.0) || !std::isfinite(ratio))
    throw std::invalid_argument("geometric schedule needs ratio > 1");
}

GrowthSchedule GrowthSchedule::geometric(double ratio) { return GrowthSchedule(ratio); }

GrowthSchedule GrowthSchedule::exponential() {
  GrowthSchedule s(kE);
  s.log_ratio_ = 1.0;
  return s;
}

std::string GrowthSchedule::describe() const {
  if (log_ratio_ == 1.0) return "exp";
  return "geometric:" + fmt_num(ratio_);
}

Normalizer Normalizer::loglog() { return Normalizer(Kind::loglog, 0.0); }

Normalizer Normalizer::constant(double value) {
  if (!(value > 0.0)) throw std::invalid_argument("constant normalizer must be > 0");
  return Normalizer(Kind::constant, value);
}

double Normalizer::at_log(double log_t) const {
  if (kind_ == Kind::constant) return value_;
  return std::sqrt(std::log(std::abs(log_t) + kE));
}

std::string Normalizer::describe() const {
  if (kind_ == Kind::constant) return "constant:" + fmt_num(value_);
  return "loglog";
}

WeightFn WeightFn::phi1(std::optional<double> delta) {
  if (delta && !(*delta >= 0.0)) throw std::invalid_argument("phi delta must be >= 0");
  return WeightFn(Kind::phi1, delta ? 2.0 + *delta : 1.0);
}

WeightFn WeightFn::phi2(std::optional<double> delta) {
  if (delta && !(*delta >= 0.0)) throw std::invalid_argument("phi delta must be >= 0");
  return WeightFn(Kind::phi2, delta ? 2.0 + *delta : 1.0);
}

WeightFn WeightFn::constant(double value) {
  if (!(value > 0.0)) throw std::invalid_argument("constant weight must be > 0");
  return WeightFn(Kind::constant, value * value);
}

double WeightFn::operator()(double x1, double x2) const {
  switch (kind_) {
    case Kind::phi1:
      return std::sqrt(scale_sq_ * std::log(std::log2(x1 * x2) + kE));
    case Kind::phi2:
      return std::sqrt(scale_sq_ * (std::log(kE + std::log2(x1)) + std::log(kE + std::log2(x2))));
    case Kind::constant:
      break;
  }
  return std::sqrt(scale_sq_);
}

double WeightFn::dyadic_sq(long n, long m) const {
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  switch (kind_) {
    case Kind::phi1:
      return scale_sq_ * std::log(dn + dm + kE);
    case Kind::phi2:
      return scale_sq_ * (std::log(dn + kE) + std::log(dm + kE));
    case Kind::constant:
      break;
  }
  return scale_sq_;
}

std::string WeightFn::describe() const {
  switch (kind_) {
    case Kind::phi1:
      return scale_sq_ == 1.0 ? "phi1" : "phi1:delta=" + fmt_num(scale_sq_ - 2.0);
    case Kind::phi2:
      return scale_sq_ == 1.0 ? "phi2" : "phi2:delta=" + fmt_num(scale_sq_ - 2.0);
    case Kind::constant:
      break;
  }
  return "constant:" + fmt_num(std::sqrt(scale_sq_));
}

double schedule_weight(const HurstPair& h, const GrowthSchedule& sched, const Normalizer& c, long k) {
  const double lb = sched.log_b(k);
  return std::exp(h.h_sum() * (lb - sched.log_b(k + 1))) * c.at_log(lb);
}

MConstant schedule_m_constant(const HurstPair& h, const GrowthSchedule& sched, const Normalizer& c,
                              long k_probe) {
  if (k_probe < 16) throw std::invalid_argument("schedule_m_constant: k_probe must be >= 16");
  MConstant out;
  out.value = schedule_weight(h, sched, c, 0);
  const long quarter = k_probe - k_probe / 4;
  for (long k = 1; k <= k_probe; ++k) {
    const double w = schedule_weight(h, sched, c, k);
    if (w < out.value) {
      out.value = w;
      out.argmin = k;
      if (k > quarter) out.stabilized = false;
    }
  }
  if (!(out.value > 0.0)) throw std::domain_error("schedule infimum M is not positive");
  return out;
}

double quadrant_c1(const HurstPair& h) {
  return h.n1() * h.n2() * std::exp(h.q() + 1.0 / (2.0 * (std::pow(4.0, h.h_sum()) + 1.0)));
}

double quadrant_c2(const HurstPair& h) {
  const double hm = h.h_min();
  return 3.0 / (2.0 * std::pow(4.0, h.h_max()) * (3.0 * std::pow(4.0, hm) + std::pow(4.0, 1.0 - hm)));
}

double cor36_u(const HurstPair& h, double m) {
  return 3.0 * m * m / (4.0 * (std::pow(4.0, 1.0 - h.h_min()) + 3.0));
}

double cor48_reference_sq(const WeightFn& phi) { return std::min(phi.dyadic_sq(0, 0), 1.0); }

double cor48_u(const HurstPair& h, double reference_sq) { return quadrant_c2(h) * reference_sq / 2.0; }

double thm35_threshold(const HurstPair& h, const GrowthSchedule& sched, const Normalizer& c) {
  if (!grows(c)) return kInf;
  const double m = schedule_m_constant(h, sched, c).value;
  return std::max(2.0 / m, 1.0 / (m * std::sqrt(thm35_c(h))));
}

double cor36_threshold(const HurstPair& h, const GrowthSchedule& sched, const Normalizer& c) {
  if (!grows(c)) return kInf;
  const double m = schedule_m_constant(h, sched, c).value;
  return std::sqrt(2.0 / cor36_u(h, m));
}

double thm47_threshold(const HurstPair& h, const WeightFn& phi) {
  if (phi.kind() == WeightFn::Kind::constant) return kInf;
  const double floor = dyadic_b_floor(phi.kind());
  return std::max(2.0 / phi.at_one(), std::sqrt(floor / (quadrant_c2(h) * phi.scale_sq())));
}

double cor48_threshold(const HurstPair& h, const WeightFn& phi, std::optional<double> reference_sq) {
  if (phi.kind() == WeightFn::Kind::constant) return kInf;
  const double theta = reference_sq.value_or(cor48_reference_sq(phi));
  if (!(theta > 0.0) || theta > phi.dyadic_sq(0, 0) * (1.0 + kSlack)) return kInf;
  if (!(2.0 * phi.scale_sq() / theta > dyadic_b_floor(phi.kind()))) return kInf;
  return std::sqrt(2.0 / cor48_u(h, theta));
}

double example2_threshold(const HurstPair& h, WeightFn::Kind which) {
  if (which != WeightFn::Kind::phi2) return kInf;
  return 2.0 / std::sqrt(quadrant_c2(h));
}

GlobalBound global_bound_thm35(const HurstPair& h, const GrowthSchedule& sched, const Normalizer& c,
                               double eps, const SeriesOptions& opts) {
  GlobalBound out;
  BoundResult& r = out.result;
  r = start("thm35", eps);
  const MConstant m = schedule_m_constant(h, sched, c, kProbe);
  const double a = 2.0 / h.h_min();
  const double b = thm35_c(h) * eps * eps * m.value * m.value;
  r.params.emplace_back("M", m.value);
  r.params.emplace_back("series_b", b);
  detail::require(r, "eps > 2/M", eps > 2.0 / m.value);
  detail::require(r, "M verified", m.stabilized);
  detail::require(r, "series decays", grows(c));
  detail::require(r, "series converges", b > 1.0);
  if (!r.valid()) {
    detail::finish_from_log(r, 0.0);
    return out;
  }

  const double log_m = std::log(m.value);
  auto rho = [&](long k) {
    return std::exp(2.0 * (std::log(schedule_weight(h, sched, c, k)) - log_m));
  };
  out.series = sum_relative_1d(a, b, sched.log_ratio(), rho, opts);
  record_series(r, out.series);
  const double log_v = std::log(16.0) + a + 0.5 + 2.0 * a * std::log(eps) - b + 2.0 * a * log_m +
                       std::log(out.series.bound());
  detail::finish_from_log(r, log_v);
  return out;
}

GlobalBound global_bound_cor36(const HurstPair& h, const GrowthSchedule& sched, const Normalizer& c,
                               double eps, const SeriesOptions& opts) {
  GlobalBound out;
  BoundResult& r = out.result;
  r = start("cor36", eps);
  const MConstant m = schedule_m_constant(h, sched, c, kProbe);
  const double a = 2.0 / h.h_min();
  const double u = cor36_u(h, m.value);
  const double log_m = std::log(m.value);
  double v_min = kInf;
  for (long k = 0; k <= kProbe; ++k) {
    const double w = schedule_weight(h, sched, c, k);
    v_min = std::min(v_min, 2.0 * w * w / (m.value * m.value));
  }
  r.params.emplace_back("M", m.value);
  r.params.emplace_back("u", u);
  r.params.emplace_back("v_min", v_min);
  detail::require(r, "u eps^2 > 2", u * eps * eps > 2.0);
  detail::require(r, "v_k >= 2", v_min >= 2.0 * (1.0 - kSlack));
  detail::require(r, "M verified", m.stabilized);
  detail::require(r, "series decays", grows(c));
  if (!r.valid()) {
    detail::finish_from_log(r, 0.0);
    return out;
  }

  auto rho = [&](long k) {
    return std::exp(2.0 * (std::log(schedule_weight(h, sched, c, k)) - log_m));
  };
  out.series = sum_relative_1d(a, 2.0, sched.log_ratio(), rho, opts);
  record_series(r, out.series);
  // sum v_k^a e^{-v_k} = 2^a e^{-2} * relative sum; 16 e^{1/2} (e/2)^a 2^a = 16 e^{1/2 + a}
  const double log_v = std::log(16.0) + 0.5 + a + 2.0 * a * std::log(eps) - 2.0 +
                       std::log(out.series.bound()) + 2.0 * a * log_m - u * eps * eps;
  detail::finish_from_log(r, log_v);
  return out;
}

GlobalBound example1_bound(const HurstPair& h, double eps, const SeriesOptions& opts) {
  GlobalBound out;
  BoundResult& r = out.result;
  r = start("example1", eps);
  const double hm = h.h_min();
  const double s = h.h_sum();
  const double a = 2.0 / hm;
  const double u = 3.0 * std::exp(-2.0 * s) / (4.0 * (std::pow(4.0, 1.0 - hm) + 3.0));
  r.params.emplace_back("M", std::exp(-s));
  r.params.emplace_back("u", u);
  detail::require(r, "u eps^2 > 2", u * eps * eps > 2.0);
  if (!r.valid()) {
    detail::finish_from_log(r, 0.0);
    return out;
  }

  auto rho = [](long k) { return std::log(static_cast<double>(k) + kE); };
  out.series = sum_relative_1d(a, 2.0, 1.0, rho, opts);
  record_series(r, out.series);
  // sum (ln(k+e))^a / (k+e)^2 = e^{-2} * relative sum
  const double log_v = std::log(16.0) + 0.5 + a + 2.0 * a * std::log(eps) - 2.0 +
                       std::log(out.series.bound()) - 4.0 * s / hm - u * eps * eps;
  detail::finish_from_log(r, log_v);
  return out;
}

GlobalBound quadrant_bound_thm47(const HurstPair& h, const WeightFn& phi, double eps,
                                 const SeriesOptions& opts) {
  GlobalBound out;
  BoundResult& r = out.result;
  r = start("thm47", eps);
  const double q = h.q();
  const double c2 = quadrant_c2(h);
  const double phi0_sq = phi.dyadic_sq(0, 0);
  const double b = c2 * eps * eps * phi.scale_sq();
  r.params.emplace_back("C1", quadrant_c1(h));
  r.params.emplace_back("C2", c2);
  r.params.emplace_back("series_b", b);
  detail::require(r, "eps > 2/phi(1,1)", eps > 2.0 / std::sqrt(phi0_sq));
  detail::require(r, "series decays", phi.kind() != WeightFn::Kind::constant);
  detail::require(r, "series converges", b > dyadic_b_floor(phi.kind()));
  if (!r.valid()) {
    detail::finish_from_log(r, 0.0);
    return out;
  }

  out.series = sum_relative_dyadic(phi.kind(), q, b, opts);
  record_series(r, out.series);
  const double log_v = std::log(quadrant_c1(h)) + 2.0 * q * std::log(eps) + q * std::log(phi0_sq) -
                       c2 * eps * eps * phi0_sq + std::log(out.series.bound());
  detail::finish_from_log(r, log_v);
  return out;
}

GlobalBound quadrant_bound_cor48(const HurstPair& h, const WeightFn& phi, double eps,
                                 const SeriesOptions& opts, std::optional<double> reference_sq) {
  GlobalBound out;
  BoundResult& r = out.result;
  r = start("cor48", eps);
  const double q = h.q();
  const double phi0_sq = phi.dyadic_sq(0, 0);
  const double theta = reference_sq.value_or(cor48_reference_sq(phi));
  if (!(theta > 0.0)) throw std::invalid_argument("cor48 reference level must be > 0");
  const double u = cor48_u(h, theta);
  const double beta = 2.0 * phi.scale_sq() / theta;
  double v_min = kInf;
  for (long n = 0; n <= 16; ++n)
    for (long m = 0; m <= 16; ++m) v_min = std::min(v_min, 2.0 * phi.dyadic_sq(n, m) / theta);
  r.params.emplace_back("C1", quadrant_c1(h));
  r.params.emplace_back("u", u);
  r.params.emplace_back("reference_sq", theta);
  r.params.emplace_back("v_min", v_min);
  r.params.emplace_back("series_b", beta);
  detail::require(r, "u eps^2 > 2", u * eps * eps > 2.0);
  detail::require(r, "v_nm >= 2", v_min >= 2.0 * (1.0 - kSlack));
  detail::require(r, "series decays", phi.kind() != WeightFn::Kind::constant);
  detail::require(r, "series converges", beta > dyadic_b_floor(phi.kind()));
  if (!r.valid()) {
    detail::finish_from_log(r, 0.0);
    return out;
  }

  out.series = sum_relative_dyadic(phi.kind(), q, beta, opts);
  record_series(r, out.series);
  const double log_v = std::log(quadrant_c1(h)) + 2.0 * q * std::log(eps) - u * eps * eps +
                       q * std::log(phi0_sq) - 2.0 * phi0_sq / theta + std::log(out.series.bound());
  detail::finish_from_log(r, log_v);
  return out;
}

GlobalBound example2_bounds(const HurstPair& h, WeightFn::Kind which, double eps,
                            const SeriesOptions& opts) {
  if (which == WeightFn::Kind::constant)
    throw std::invalid_argument("example2_bounds: which must be phi1 or phi2");
  GlobalBound out;
  BoundResult& r = out.result;
  r = start(which == WeightFn::Kind::phi1 ? "example2_phi1" : "example2_phi2", eps);
  const double q = h.q();
  const double c2 = quadrant_c2(h);
  r.params.emplace_back("C1", quadrant_c1(h));
  r.params.emplace_back("C2", c2);
  detail::require(r, "u eps^2 > 2", c2 * eps * eps / 2.0 > 2.0);
  detail::require(r, "series converges", 2.0 > dyadic_b_floor(which));
  if (!r.valid()) {
    detail::finish_from_log(r, 0.0);
    return out;
  }

  out.series = sum_relative_dyadic(which, q, 2.0, opts);
  record_series(r, out.series);
  // first term of the printed series: e^{-2} (phi1) or 2^Q e^{-4} (phi2)
  const double g = g00(which);
  const double log_v = std::log(quadrant_c1(h)) + 2.0 * q * std::log(eps) - c2 * eps * eps / 2.0 +
                       q * std::log(g) - 2.0 * g + std::log(out.series.bound());
  detail::finish_from_log(r, log_v);
  return out;
}

}  // namespace sheet_extremes
