#pragma once

#include "sheet_extremes/field_model.hpp"

#include <optional>
#include <variant>

namespace sheet_extremes {

/// rho_1(t, s) = max_i |t_i - s_i|
struct MaxMetric {};

/// rho_2(t, s) = |t1 - s1|^{H1} + |t2 - s2|^{H2}
struct HolderMetric {
  HurstPair h;
};

using MetricKind = std::variant<MaxMetric, HolderMetric>;

double distance(const MetricKind& metric, const Point2& t, const Point2& s);

/// Increment modulus sigma(h) = C h^alpha.
struct PowerSigma {
  double c = 1.0;
  double alpha = 1.0;

  PowerSigma() = default;
  PowerSigma(double c_, double alpha_);

  double operator()(double h) const;
  double inverse(double u) const;
};

/// Upper bound (T C^{1/alpha} / (2 u^{1/alpha}) + 1)^2 on N(sigma^{-1}(u)) for the
/// max metric on a square of side T. Throws on a non-square rectangle.
double covering_bound_rho1(const Rect& rect, const PowerSigma& sigma, double u);

/// Upper bound 2 (T1/(4 K1 u^{1/H1}) + 3/2)(T2/(4 K2 u^{1/H2}) + 3/2) on the number
/// of closed rho_2-balls of radius u covering a T1 x T2 rectangle. Only the side
/// lengths enter (the metric is translation invariant).
double covering_bound_rho2(const HurstPair& h, const Rect& rect, double u);

/// Greedy set cover of the grid_res x grid_res lattice of rect by closed metric
/// balls of radius u centred at lattice points. Ties go to the lexicographically
/// first centre.
int covering_oracle(const MetricKind& metric, const Rect& rect, double u, int grid_res = 256);

/// Size of a maximal set of lattice points with pairwise distance > 2u, built
/// greedily in lexicographic order. Lower-bounds the covering number N(u).
int packing_oracle(const MetricKind& metric, const Rect& rect, double u, int grid_res = 256);

struct CoveringEstimate {
  double radius = 0.0;
  double formula_bound = 0.0;
  std::optional<int> oracle_cover_count;
  std::optional<int> oracle_packing_count;
  std::optional<int> grid_resolution;

  /// Packing count does not exceed the closed-form bound.
  bool consistent() const {
    return !oracle_packing_count || *oracle_packing_count <= formula_bound;
  }
};

/// Runs the packing oracle (and optionally the cover oracle) next to a formula.
CoveringEstimate estimate_covering(const MetricKind& metric, const Rect& rect, double radius,
                                   double formula_bound, int grid_res, bool with_cover);

}  // namespace sheet_extremes
