#pragma once

// Upper bounds on I_T(eps) = P{ sup_{t in T} |X(t)| > eps } over compact domains.
//
// Every bound is evaluated in log space and exponentiated once. Range and
// threshold violations do not throw: they produce a BoundResult whose validity
// list records the failed condition and whose value is absent.

#include "sheet_extremes/field_model.hpp"
#include "sheet_extremes/metrics.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sheet_extremes {

struct ValidityCondition {
  std::string name;
  bool satisfied = false;
};

struct BoundResult {
  std::string family;
  double epsilon = 0.0;
  std::optional<double> value;
  std::optional<double> log_value;
  std::vector<std::pair<std::string, double>> params;
  std::vector<ValidityCondition> validity;
  bool vacuous = false;    // value > 1: valid but uninformative
  bool underflow = false;  // value below 1e-300, reported as 0

  bool valid() const;
  /// Value of a recorded parameter; throws std::out_of_range if absent.
  double param(std::string_view name) const;
  /// Names of the violated validity conditions, comma separated.
  std::string violations() const;
};

/// Inputs of the generic entropy bound with sigma(h) = C h^alpha and r(v) = v^mu.
struct GenericBoundInputs {
  PowerSigma sigma;
  double gamma = 1.0;   // sup of the pointwise standard deviation
  double beta = 1.0;    // sigma of the Chebyshev radius of the domain
  double p = 0.5;
  double lambda = 1.0;  // ignored by the optimized form
  double mu = 0.1;
  /// u -> log of an upper bound on N(sigma^{-1}(u)). Kept in log form so the
  /// singular end u -> 0 never overflows.
  std::function<double(double)> log_entropy;
  /// Growth exponent d of N(sigma^{-1}(u)) ~ u^{-d} as u -> 0; the entropy
  /// integral is finite iff mu * d < 1. For the max metric d = 2/alpha.
  std::optional<double> entropy_exponent;
};

/// Entropy factor r^{-1}( (beta p)^{-1} int_0^{beta p} r(N(sigma^{-1}(u))) du ).
struct EntropyFactor {
  double mean_integral = 0.0;  // (beta p)^{-1} int ... du
  double log_factor = 0.0;     // log of r^{-1}(mean_integral)
  double error_estimate = 0.0;
};

/// Substitutes u = beta p e^{-y} and integrates over [0, inf) with exp-sinh
/// quadrature to 1e-9 relative; throws std::runtime_error on non-convergence.
EntropyFactor entropy_factor(const GenericBoundInputs& in);

/// Minimizer of the exponent over lambda > 0.
double lambda_star(const GenericBoundInputs& in, double eps);

BoundResult generic_bound_thm21(const GenericBoundInputs& in, double eps);
BoundResult optimized_bound_cor22(const GenericBoundInputs& in, double eps);

/// Generic inputs for the max metric on [0,T]^2.
GenericBoundInputs rho1_square_inputs(double side, const PowerSigma& sigma, double gamma, double p,
                                      double mu);
/// Generic inputs for the Hölder metric on [0,T1] x [0,T2], T_i >= 1, with
/// sigma(h) = T_eta h.
GenericBoundInputs rho2_rect_inputs(const HurstPair& h, const Rect& rect, double p, double mu);

// Closed forms. Limits mu -> 0 are already taken.

/// 8 exp{-eps^2 (1-p) / (2 (gamma^2 + C^2 T^{2 alpha} p / (2^{2 alpha} (1-p))))} (e/p)^{2/alpha}
BoundResult bound_power_sigma(double sigma_c, double sigma_alpha, double side, double gamma,
                              double p, double eps);
/// [0,1]^2 under rho_1 with sigma(h) = 2 h^H, gamma = 1.
BoundResult bound_unit_square_rho1(const HurstPair& h, double p, double eps);
/// Bound on P{ sup_{[0,T1]x[0,T2]} |X| / (T1^{H1} T2^{H2}) > eps }; equals the unit-square bound.
BoundResult bound_rect_scaled(const HurstPair& h, const Rect& rect, double p, double eps);
/// Threshold eps' on the raw sup over rect, converted to the normalized scale.
double normalized_threshold(const HurstPair& h, const Rect& rect, double raw_eps);
/// Unit-square bound at p = 1/eps^2, eps > 2.
BoundResult bound_unit_square_eps(const HurstPair& h, double eps);
/// [0,T1] x [0,T2] under rho_2, T_i >= 1.
BoundResult bound_rect_rho2(const HurstPair& h, const Rect& rect, double p, double eps);
BoundResult bound_rect_rho2_eps(const HurstPair& h, const Rect& rect, double eps);
/// [1,2]^2 under rho_2.
BoundResult bound_square12_rho2(const HurstPair& h, double p, double eps);
BoundResult bound_square12_eps(const HurstPair& h, double eps);

namespace detail {
/// Fills value/log_value/flags from a log-space value.
void finish_from_log(BoundResult& r, double log_value);
void require(BoundResult& r, std::string name, bool ok);
}  // namespace detail

}  // namespace sheet_extremes
