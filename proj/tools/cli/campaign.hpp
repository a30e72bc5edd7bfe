#pragma once

#include "sheet_extremes/bounds.hpp"
#include "sheet_extremes/global_bounds.hpp"
#include "sheet_extremes/optimizer.hpp"
#include "sheet_extremes/simulator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sheet_extremes::cli {

struct DomainSpec {
  enum class Kind { unit, rect, square12, quadrant, plane };
  Kind kind = Kind::unit;
  Rect rect = Rect::unit();  // compact domains only

  bool compact() const { return kind != Kind::quadrant && kind != Kind::plane; }
  std::string describe() const;
};

/// unit | rect:T1,T2 | square12 | quadrant | plane
DomainSpec parse_domain(const std::string& text);
/// "H1,H2"
HurstPair parse_hurst(const std::string& text);
/// geometric:r | exp
GrowthSchedule parse_schedule(const std::string& text);
/// loglog | constant:c
Normalizer parse_normalizer(const std::string& text);
/// phi1 | phi2, with an optional delta
WeightFn parse_weight(const std::string& text, std::optional<double> delta);
/// "N1xN2"
std::pair<long, long> parse_grid(const std::string& text);

struct ModelChoices {
  GrowthSchedule schedule = GrowthSchedule::exponential();
  Normalizer normalizer = Normalizer::loglog();
  WeightFn phi = WeightFn::phi2();
  SeriesOptions series{};
  std::optional<double> mu;  // generic-bound exponent, default H/4
};

struct BoundRow {
  BoundResult result;
  std::optional<SeriesValue> series;
  std::optional<double> p;  // parameter used by a parametric family
};

/// Canonical family id (aliases such as eq13 or eq21-proofform resolved), or
/// std::invalid_argument.
std::string canonical_family(const std::string& id);
/// Families that bound the raw or normalized sup over the domain.
std::vector<std::string> default_families(const DomainSpec& d);
bool family_fits(const std::string& family, const DomainSpec& d);

/// Evaluates one family. Parametric families use `p` when given and an
/// optimized p otherwise.
BoundRow evaluate_bound(const std::string& family, const HurstPair& h, const DomainSpec& d,
                        double eps, const ModelChoices& m, std::optional<double> p);

/// Smallest eps at which some family becomes valid (series families only).
std::vector<double> default_eps(const HurstPair& h, const DomainSpec& d, const ModelChoices& m);

struct McSetup {
  Grid2 grid;
  PointWeight weight;
  std::string region;  // human-readable description of the simulated region
};

/// Default grid and normalization for the Monte Carlo estimate over a domain.
McSetup mc_setup(const HurstPair& h, const DomainSpec& d, const ModelChoices& m, long n1, long n2);

}  // namespace sheet_extremes::cli
