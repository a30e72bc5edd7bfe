#include "sheet_extremes/bounds.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sheet_extremes {

namespace {

constexpr double kLogUnderflow = -690.7755278982137;  // log(1e-300)
constexpr double kQuadratureTol = 1e-9;

/// log(e^a + e^b)
double log_add(double a, double b) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  return hi + std::log1p(std::exp(lo - hi));
}

bool in_open_unit(double p) { return p > 0.0 && p < 1.0; }

BoundResult start(std::string family, double eps) {
  BoundResult r;
  r.family = std::move(family);
  r.epsilon = eps;
  return r;
}

void add_hurst(BoundResult& r, const HurstPair& h) {
  r.params.emplace_back("h1", h.h1());
  r.params.emplace_back("h2", h.h2());
}

/// Exponent -eps^2 (1-p) / (2 (g2 + b2 p / (1-p))) shared by every parametric form.
double gaussian_exponent(double eps, double p, double gamma_sq, double beta_sq) {
  return -eps * eps * (1.0 - p) / (2.0 * (gamma_sq + beta_sq * p / (1.0 - p)));
}

}  // namespace

namespace detail {

void finish_from_log(BoundResult& r, double log_value) {
  if (!r.valid()) {
    r.value.reset();
    r.log_value.reset();
    return;
  }
  if (std::isnan(log_value)) throw std::runtime_error(r.family + ": bound evaluated to NaN");
  r.log_value = log_value;
  if (log_value < kLogUnderflow) {
    r.value = 0.0;
    r.underflow = true;
  } else {
    r.value = std::exp(log_value);
  }
  r.vacuous = log_value > 0.0;
}

void require(BoundResult& r, std::string name, bool ok) {
  r.validity.push_back({std::move(name), ok});
}

}  // namespace detail

bool BoundResult::valid() const {
  return std::all_of(validity.begin(), validity.end(),
                     [](const ValidityCondition& c) { return c.satisfied; });
}

double BoundResult::param(std::string_view name) const {
  for (const auto& [k, v] : params)
    if (k == name) return v;
  throw std::out_of_range("BoundResult: no parameter named " + std::string(name));
}

std::string BoundResult::violations() const {
  std::string out;
  for (const auto& c : validity) {
    if (c.satisfied) continue;
    if (!out.empty()) out += ",";
    out += c.name;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generic entropy bound

EntropyFactor entropy_factor(const GenericBoundInputs& in) {
  if (!in.log_entropy) throw std::invalid_argument("entropy_factor: no entropy function");
  const double top = in.beta * in.p;
  const double mu = in.mu;
  // (beta p)^{-1} int_0^{beta p} N^mu du  =  int_0^inf exp(mu log N(beta p e^{-y}) - y) dy
  auto integrand = [&](double y) {
    const double u = top * std::exp(-y);
    if (!(u > 0.0)) return 0.0;  // far tail, integrand decays like e^{(mu d - 1) y}
    const double log_n = in.log_entropy(u);
    return std::isfinite(log_n) ? std::exp(mu * log_n - y) : 0.0;
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  double error = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(integrand, kQuadratureTol, &error, &l1);
  if (!std::isfinite(value) || !(value > 0.0) || error > 1e-6 * value) {
    throw std::runtime_error("entropy_factor: quadrature did not converge (estimate " +
                             std::to_string(value) + ", error " + std::to_string(error) + ")");
  }
  EntropyFactor f;
  f.mean_integral = value;
  f.log_factor = std::log(value) / mu;
  f.error_estimate = error;
  return f;
}

double lambda_star(const GenericBoundInputs& in, double eps) {
  const double p = in.p;
  return eps * (1.0 - p) / (in.gamma * in.gamma + in.beta * in.beta * p / (1.0 - p));
}

namespace {

void check_generic(BoundResult& r, const GenericBoundInputs& in, double eps, bool uses_lambda) {
  r.params.emplace_back("sigma_c", in.sigma.c);
  r.params.emplace_back("sigma_alpha", in.sigma.alpha);
  r.params.emplace_back("gamma", in.gamma);
  r.params.emplace_back("beta", in.beta);
  r.params.emplace_back("p", in.p);
  r.params.emplace_back("mu", in.mu);
  const double d = in.entropy_exponent.value_or(2.0 / in.sigma.alpha);
  detail::require(r, "eps > 0", eps > 0.0);
  detail::require(r, "0 < p < 1", in_open_unit(in.p));
  detail::require(r, "gamma >= 0", in.gamma >= 0.0);
  detail::require(r, "beta > 0", in.beta > 0.0);
  detail::require(r, "0 < mu < alpha/2", in.mu > 0.0 && in.mu < in.sigma.alpha / 2.0);
  detail::require(r, "mu * d < 1", in.mu * d < 1.0);
  if (uses_lambda) detail::require(r, "lambda > 0", in.lambda > 0.0);
}

}  // namespace

BoundResult generic_bound_thm21(const GenericBoundInputs& in, double eps) {
  BoundResult r = start("thm21", eps);
  check_generic(r, in, eps, true);
  r.params.emplace_back("lambda", in.lambda);
  if (!r.valid()) return r;
  const double p = in.p;
  const double lam = in.lambda;
  const double exponent = lam * lam * in.gamma * in.gamma / (2.0 * (1.0 - p)) +
                          p * lam * lam * in.beta * in.beta / (2.0 * (1.0 - p) * (1.0 - p)) -
                          lam * eps;
  const EntropyFactor f = entropy_factor(in);
  r.params.emplace_back("entropy_mean", f.mean_integral);
  detail::finish_from_log(r, std::log(2.0) + exponent + f.log_factor);
  return r;
}

BoundResult optimized_bound_cor22(const GenericBoundInputs& in, double eps) {
  BoundResult r = start("cor22", eps);
  check_generic(r, in, eps, false);
  if (!r.valid()) return r;
  r.params.emplace_back("lambda_star", lambda_star(in, eps));
  const double exponent = gaussian_exponent(eps, in.p, in.gamma * in.gamma, in.beta * in.beta);
  const EntropyFactor f = entropy_factor(in);
  r.params.emplace_back("entropy_mean", f.mean_integral);
  detail::finish_from_log(r, std::log(2.0) + exponent + f.log_factor);
  return r;
}

GenericBoundInputs rho1_square_inputs(double side, const PowerSigma& sigma, double gamma, double p,
                                      double mu) {
  if (!(side > 0.0)) throw std::invalid_argument("rho1_square_inputs: side must be > 0");
  GenericBoundInputs in;
  in.sigma = sigma;
  in.gamma = gamma;
  in.beta = sigma(side / 2.0);
  in.p = p;
  in.mu = mu;
  in.entropy_exponent = 2.0 / sigma.alpha;
  // log (T C^{1/alpha} / (2 u^{1/alpha}) + 1)^2
  const double log_scale = std::log(side / 2.0) + std::log(sigma.c) / sigma.alpha;
  const double inv_alpha = 1.0 / sigma.alpha;
  in.log_entropy = [=](double u) { return 2.0 * log_add(log_scale - inv_alpha * std::log(u), 0.0); };
  return in;
}

GenericBoundInputs rho2_rect_inputs(const HurstPair& h, const Rect& rect, double p, double mu) {
  const double t1 = rect.width1();
  const double t2 = rect.width2();
  const double t_eta = std::max(std::pow(t1, h.h1()), std::pow(t2, h.h2()));
  GenericBoundInputs in;
  in.sigma = PowerSigma(t_eta, 1.0);
  in.gamma = std::pow(t1, h.h1()) * std::pow(t2, h.h2());
  in.beta = t_eta * (std::pow(t1 / 2.0, h.h1()) + std::pow(t2 / 2.0, h.h2()));
  in.p = p;
  in.mu = mu;
  in.entropy_exponent = h.q();
  const double a1 = std::log(t1 / (4.0 * h.k1()));
  const double a2 = std::log(t2 / (4.0 * h.k2()));
  const double e1 = 1.0 / h.h1();
  const double e2 = 1.0 / h.h2();
  const double log15 = std::log(1.5);
  in.log_entropy = [=](double u) {
    const double lr = std::log(u / t_eta);
    return std::log(2.0) + log_add(a1 - e1 * lr, log15) + log_add(a2 - e2 * lr, log15);
  };
  return in;
}

// ---------------------------------------------------------------------------
// Closed forms

BoundResult bound_power_sigma(double sigma_c, double sigma_alpha, double side, double gamma,
                              double p, double eps) {
  BoundResult r = start("eq9", eps);
  r.params = {{"sigma_c", sigma_c}, {"sigma_alpha", sigma_alpha}, {"T", side}, {"gamma", gamma}, {"p", p}};
  detail::require(r, "eps > 0", eps > 0.0);
  detail::require(r, "0 < p < 1", in_open_unit(p));
  detail::require(r, "C > 0", sigma_c > 0.0);
  detail::require(r, "0 < alpha <= 1", sigma_alpha > 0.0 && sigma_alpha <= 1.0);
  detail::require(r, "T > 0", side > 0.0);
  if (!r.valid()) return r;
  const double beta_sq = sigma_c * sigma_c * std::pow(side, 2.0 * sigma_alpha) /
                         std::pow(2.0, 2.0 * sigma_alpha);
  const double log_v = std::log(8.0) + gaussian_exponent(eps, p, gamma * gamma, beta_sq) +
                       (2.0 / sigma_alpha) * (1.0 - std::log(p));
  detail::finish_from_log(r, log_v);
  return r;
}

BoundResult bound_unit_square_rho1(const HurstPair& h, double p, double eps) {
  BoundResult r = start("eq10", eps);
  add_hurst(r, h);
  r.params.emplace_back("p", p);
  detail::require(r, "eps > 0", eps > 0.0);
  detail::require(r, "0 < p < 1", in_open_unit(p));
  if (!r.valid()) return r;
  const double H = h.h_min();
  const double beta_sq = 4.0 / std::pow(2.0, 2.0 * H);
  const double log_v =
      std::log(8.0) + gaussian_exponent(eps, p, 1.0, beta_sq) + (2.0 / H) * (1.0 - std::log(p));
  detail::finish_from_log(r, log_v);
  return r;
}

double normalized_threshold(const HurstPair& h, const Rect& rect, double raw_eps) {
  return raw_eps / (std::pow(rect.width1(), h.h1()) * std::pow(rect.width2(), h.h2()));
}

BoundResult bound_rect_scaled(const HurstPair& h, const Rect& rect, double p, double eps) {
  BoundResult r = bound_unit_square_rho1(h, p, eps);
  r.family = "eq11";
  r.params.emplace_back("T1", rect.width1());
  r.params.emplace_back("T2", rect.width2());
  detail::require(r, "rect anchored at origin", rect.anchored_at_origin());
  if (!r.valid()) {
    r.value.reset();
    r.log_value.reset();
    r.vacuous = false;
    r.underflow = false;
  }
  return r;
}

BoundResult bound_unit_square_eps(const HurstPair& h, double eps) {
  BoundResult r = start("eq12", eps);
  add_hurst(r, h);
  detail::require(r, "eps > 2", eps > 2.0);
  if (!r.valid()) return r;
  const double H = h.h_min();
  const double a = std::pow(4.0, 1.0 - H);
  const double log_v = std::log(8.0) + 2.0 / H + 0.5 + (4.0 / H) * std::log(eps) -
                       3.0 * eps * eps / (2.0 * (a + 3.0));
  detail::finish_from_log(r, log_v);
  return r;
}

namespace {

struct Rho2RectConstants {
  double gamma_sq;  // T1^{2H1} T2^{2H2}
  double t_eta4;    // T_eta^4
};

Rho2RectConstants rho2_rect_constants(const HurstPair& h, const Rect& rect) {
  const double t1 = rect.width1();
  const double t2 = rect.width2();
  const double t_eta = std::max(std::pow(t1, h.h1()), std::pow(t2, h.h2()));
  return {std::pow(t1, 2.0 * h.h1()) * std::pow(t2, 2.0 * h.h2()), std::pow(t_eta, 4.0)};
}

void require_rho2_rect(BoundResult& r, const HurstPair& h, const Rect& rect) {
  add_hurst(r, h);
  r.params.emplace_back("T1", rect.width1());
  r.params.emplace_back("T2", rect.width2());
  detail::require(r, "rect anchored at origin", rect.anchored_at_origin());
  detail::require(r, "T1 >= 1", rect.width1() >= 1.0);
  detail::require(r, "T2 >= 1", rect.width2() >= 1.0);
}

}  // namespace

BoundResult bound_rect_rho2(const HurstPair& h, const Rect& rect, double p, double eps) {
  BoundResult r = start("eq15", eps);
  require_rho2_rect(r, h, rect);
  r.params.emplace_back("p", p);
  detail::require(r, "eps > 0", eps > 0.0);
  detail::require(r, "0 < p < 1", in_open_unit(p));
  if (!r.valid()) return r;
  const auto c = rho2_rect_constants(h, rect);
  const double beta_sq = std::pow(4.0, 1.0 - h.h_min()) * c.t_eta4;
  const double log_v = std::log(h.n1() * h.n2()) + h.q() * (1.0 - std::log(p)) +
                       gaussian_exponent(eps, p, c.gamma_sq, beta_sq);
  detail::finish_from_log(r, log_v);
  return r;
}

BoundResult bound_rect_rho2_eps(const HurstPair& h, const Rect& rect, double eps) {
  BoundResult r = start("eq16", eps);
  require_rho2_rect(r, h, rect);
  detail::require(r, "eps > 2", eps > 2.0);
  if (!r.valid()) return r;
  const auto c = rho2_rect_constants(h, rect);
  const double a = std::pow(4.0, 1.0 - h.h_min());
  const double q = h.q();
  const double log_v = std::log(h.n1() * h.n2()) + 2.0 * q * std::log(eps) + q +
                       3.0 / (2.0 * c.gamma_sq * (3.0 + a)) -
                       3.0 * eps * eps / (2.0 * (3.0 * c.gamma_sq + a * c.t_eta4));
  detail::finish_from_log(r, log_v);
  return r;
}

BoundResult bound_square12_rho2(const HurstPair& h, double p, double eps) {
  BoundResult r = start("eq17", eps);
  add_hurst(r, h);
  r.params.emplace_back("p", p);
  detail::require(r, "eps > 0", eps > 0.0);
  detail::require(r, "0 < p < 1", in_open_unit(p));
  if (!r.valid()) return r;
  const double gamma_sq = std::pow(4.0, h.h_sum());
  const double beta = 1.0 + std::pow(2.0, std::abs(h.h1() - h.h2()));
  const double log_v = std::log(h.n1() * h.n2()) + h.q() * (1.0 - std::log(p)) +
                       gaussian_exponent(eps, p, gamma_sq, beta * beta);
  detail::finish_from_log(r, log_v);
  return r;
}

BoundResult bound_square12_eps(const HurstPair& h, double eps) {
  BoundResult r = start("eq18", eps);
  add_hurst(r, h);
  detail::require(r, "eps > 2", eps > 2.0);
  if (!r.valid()) return r;
  const double H = h.h_min();
  const double q = h.q();
  const double c2 = 3.0 / (2.0 * std::pow(4.0, h.h_max()) *
                           (3.0 * std::pow(4.0, H) + std::pow(4.0, 1.0 - H)));
  const double log_v = std::log(h.n1() * h.n2()) + q + 1.0 / (2.0 * (std::pow(4.0, h.h_sum()) + 1.0)) +
                       2.0 * q * std::log(eps) - c2 * eps * eps;
  detail::finish_from_log(r, log_v);
  return r;
}

}  // namespace sheet_extremes
