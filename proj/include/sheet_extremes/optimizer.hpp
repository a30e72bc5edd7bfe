#pragma once

// Minimization of the parametric compact-domain bounds over p in (0,1), and
// selection of the smallest applicable bound for a domain.

#include "sheet_extremes/bounds.hpp"
#include "sheet_extremes/field_model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sheet_extremes {

enum class ParametricFamily { eq9, eq10, eq15, eq17 };

std::string family_name(ParametricFamily f);
std::optional<ParametricFamily> parse_parametric_family(std::string_view name);

enum class DomainKind { unit, rect, square12 };

/// unit = [0,1]^2, square12 = [1,2]^2, rect = [0,T1]x[0,T2] with T_i >= 1.
/// Throws std::invalid_argument for other shapes.
DomainKind classify_domain(const Rect& rect);

/// Evaluates a parametric family on a domain at a fixed p. Families apply
/// either to the domain itself or to an origin-anchored superset of it
/// ([1,2]^2 inside [0,2]^2). Throws std::invalid_argument when the family has
/// no route to the domain.
BoundResult evaluate_family(ParametricFamily f, const HurstPair& h, const Rect& rect, double p,
                            double eps);
bool family_applies(ParametricFamily f, const Rect& rect);

struct FamilyValue {
  std::string family;
  std::optional<double> p;  // absent for closed forms
  std::optional<double> value;
  std::string violations;
};

struct OptimizationReport {
  std::string family;
  double best_p = 0.0;
  double best_value = 0.0;
  double best_log_value = 0.0;
  long evaluations = 0;
  std::pair<double, double> bracket{0.0, 0.0};
  bool prescan_fallback = false;  // golden-section disagreed with the coarse scan
  std::vector<FamilyValue> compared_families;
};

inline constexpr double kPMin = 1e-6;
inline constexpr double kPMax = 1.0 - 1e-6;

/// Golden-section search on log(bound) over [kPMin, kPMax] to bracket width
/// 1e-9, guarded by a 64-point scan; the result is never worse than the scan
/// or the evaluations at p = 1/eps^2, 0.5 and 0.1.
OptimizationReport optimize_p(ParametricFamily f, const HurstPair& h, const Rect& rect, double eps);

/// Smallest value over all applicable families (optimized p) and closed forms.
/// Throws std::invalid_argument if no family gives a valid value.
OptimizationReport best_bound(const HurstPair& h, const Rect& rect, double eps);

}  // namespace sheet_extremes
