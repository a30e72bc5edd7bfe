#include "cli/campaign.hpp"

#include "cli/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace sheet_extremes::cli {

namespace {

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("cannot parse " + what + " from '" + s + "'");
  return v;
}

std::pair<double, double> two_numbers(const std::string& s, char sep, const std::string& what) {
  const auto k = s.find(sep);
  if (k == std::string::npos) throw std::invalid_argument(what + " must look like A" + sep + "B");
  return {to_double(s.substr(0, k), what), to_double(s.substr(k + 1), what)};
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

using Kind = DomainSpec::Kind;

bool square_route(const DomainSpec& d) {
  if (!d.compact()) return false;
  return family_applies(ParametricFamily::eq9, d.rect);
}

double default_mu_rho1(const HurstPair& h) { return h.h_min() / 4.0; }
double default_mu_rho2(const HurstPair& h) { return 0.5 / h.q(); }

double fallback_p(double eps) { return std::clamp(1.0 / (eps * eps), kPMin, 0.5); }

BoundRow parametric(ParametricFamily f, const HurstPair& h, const DomainSpec& d, double eps,
                    std::optional<double> p) {
  BoundRow row;
  if (!p && eps > 0.0) p = optimize_p(f, h, d.rect, eps).best_p;
  row.p = p.value_or(0.5);
  row.result = evaluate_family(f, h, d.rect, *row.p, eps);
  return row;
}

// Origin-anchored rectangle the superset families run on.
Rect anchored(const DomainSpec& d) {
  return d.kind == Kind::square12 ? Rect::origin(2.0, 2.0) : d.rect;
}

}  // namespace

std::string DomainSpec::describe() const {
  switch (kind) {
    case Kind::unit:
      return "unit";
    case Kind::square12:
      return "square12";
    case Kind::quadrant:
      return "quadrant";
    case Kind::plane:
      return "plane";
    case Kind::rect:
      break;
  }
  return "rect:" + num(rect.width1()) + "," + num(rect.width2());
}

DomainSpec parse_domain(const std::string& text) {
  DomainSpec d;
  if (text == "unit") return d;
  if (text == "square12") {
    d.kind = Kind::square12;
    d.rect = Rect::square12();
    return d;
  }
  if (text == "quadrant") {
    d.kind = Kind::quadrant;
    return d;
  }
  if (text == "plane") {
    d.kind = Kind::plane;
    return d;
  }
  if (starts_with(text, "rect:")) {
    const auto [t1, t2] = two_numbers(text.substr(5), ',', "rect sides");
    if (!(t1 >= 1.0 && t2 >= 1.0)) throw std::invalid_argument("rect sides must be >= 1");
    d.kind = Kind::rect;
    d.rect = Rect::origin(t1, t2);
    if (classify_domain(d.rect) == DomainKind::unit) d.kind = Kind::unit;
    return d;
  }
  throw std::invalid_argument("unknown domain '" + text + "'");
}

HurstPair parse_hurst(const std::string& text) {
  const auto [a, b] = two_numbers(text, ',', "Hurst pair");
  return HurstPair(a, b);
}

GrowthSchedule parse_schedule(const std::string& text) {
  if (text == "exp") return GrowthSchedule::exponential();
  if (starts_with(text, "geometric:")) return GrowthSchedule::geometric(to_double(text.substr(10), "ratio"));
  throw std::invalid_argument("unknown schedule '" + text + "'");
}

Normalizer parse_normalizer(const std::string& text) {
  if (text == "loglog") return Normalizer::loglog();
  if (starts_with(text, "constant:")) return Normalizer::constant(to_double(text.substr(9), "constant"));
  throw std::invalid_argument("unknown normalizer '" + text + "'");
}

WeightFn parse_weight(const std::string& text, std::optional<double> delta) {
  if (text == "phi1") return WeightFn::phi1(delta);
  if (text == "phi2") return WeightFn::phi2(delta);
  if (starts_with(text, "constant:")) return WeightFn::constant(to_double(text.substr(9), "constant"));
  throw std::invalid_argument("unknown weight '" + text + "'");
}

std::pair<long, long> parse_grid(const std::string& text) {
  const auto [a, b] = two_numbers(text, 'x', "grid");
  if (!(a >= 1 && b >= 1) || a != std::floor(a) || b != std::floor(b))
    throw std::invalid_argument("grid sizes must be positive integers");
  return {static_cast<long>(a), static_cast<long>(b)};
}

std::string canonical_family(const std::string& id) {
  static const std::map<std::string, std::string> alias{
      {"eq13", "thm35"}, {"eq14", "cor36"}, {"eq20", "thm47"}, {"eq21-proofform", "cor48"}};
  static const std::vector<std::string> known{
      "eq9",   "eq10",  "eq11",     "eq12",  "eq15",  "eq16",  "eq17",    "eq18",
      "cor22", "cor22-rho2", "thm35", "cor36", "example1", "thm47", "cor48", "example2"};
  if (auto it = alias.find(id); it != alias.end()) return it->second;
  if (std::find(known.begin(), known.end(), id) != known.end()) return id;
  throw std::invalid_argument("unknown bound family '" + id + "'");
}

bool family_fits(const std::string& f, const DomainSpec& d) {
  if (f == "eq9" || f == "cor22") return square_route(d);
  if (f == "eq10" || f == "eq12") return d.kind == Kind::unit;
  if (f == "eq11") return d.kind == Kind::unit || d.kind == Kind::rect;
  if (f == "eq15" || f == "eq16" || f == "cor22-rho2") return d.compact();
  if (f == "eq17" || f == "eq18") return d.kind == Kind::square12;
  if (f == "thm35" || f == "cor36" || f == "example1") return d.kind == Kind::plane;
  if (f == "thm47" || f == "cor48" || f == "example2") return d.kind == Kind::quadrant;
  return false;
}

std::vector<std::string> default_families(const DomainSpec& d) {
  static const std::vector<std::string> order{"eq9",  "eq10",  "eq12",       "eq15",  "eq16",
                                              "eq17", "eq18",  "cor22",      "cor22-rho2",
                                              "thm35", "cor36", "example1", "thm47", "cor48", "example2"};
  std::vector<std::string> out;
  for (const auto& f : order)
    if (family_fits(f, d)) out.push_back(f);
  return out;
}

BoundRow evaluate_bound(const std::string& family, const HurstPair& h, const DomainSpec& d,
                        double eps, const ModelChoices& m, std::optional<double> p) {
  const std::string f = canonical_family(family);
  if (!family_fits(f, d))
    throw std::invalid_argument("family " + f + " does not apply to domain " + d.describe());

  if (f == "eq9") return parametric(ParametricFamily::eq9, h, d, eps, p);
  if (f == "eq10") return parametric(ParametricFamily::eq10, h, d, eps, p);
  if (f == "eq15") return parametric(ParametricFamily::eq15, h, d, eps, p);
  if (f == "eq17") return parametric(ParametricFamily::eq17, h, d, eps, p);

  BoundRow row;
  if (f == "eq11") {
    row.p = p.value_or(eps > 0.0 ? optimize_p(ParametricFamily::eq10, h, Rect::unit(), eps).best_p : 0.5);
    row.result = bound_rect_scaled(h, d.rect, *row.p, eps);
  } else if (f == "eq12") {
    row.result = bound_unit_square_eps(h, eps);
  } else if (f == "eq16") {
    row.result = bound_rect_rho2_eps(h, anchored(d), eps);
  } else if (f == "eq18") {
    row.result = bound_square12_eps(h, eps);
  } else if (f == "cor22" || f == "cor22-rho2") {
    row.p = p.value_or(fallback_p(eps));
    const Rect r = anchored(d);
    GenericBoundInputs in;
    if (f == "cor22") {
      const double t = r.width1();
      const PowerSigma sigma(2.0 * std::pow(t, h.h_sum() - h.h_min()), h.h_min());
      in = rho1_square_inputs(t, sigma, std::pow(t, h.h_sum()), *row.p, m.mu.value_or(default_mu_rho1(h)));
    } else {
      in = rho2_rect_inputs(h, r, *row.p, m.mu.value_or(default_mu_rho2(h)));
    }
    row.result = optimized_bound_cor22(in, eps);
    row.result.family = f;
  } else {
    GlobalBound g;
    if (f == "thm35") g = global_bound_thm35(h, m.schedule, m.normalizer, eps, m.series);
    if (f == "cor36") g = global_bound_cor36(h, m.schedule, m.normalizer, eps, m.series);
    if (f == "example1") g = example1_bound(h, eps, m.series);
    if (f == "thm47") g = quadrant_bound_thm47(h, m.phi, eps, m.series);
    if (f == "cor48") g = quadrant_bound_cor48(h, m.phi, eps, m.series);
    if (f == "example2") {
      if (m.phi.kind() == WeightFn::Kind::constant || m.phi.scale_sq() != 1.0)
        throw std::invalid_argument("example2 needs --phi phi1 or phi2 without --delta");
      g = example2_bounds(h, m.phi.kind(), eps, m.series);
    }
    row.result = std::move(g.result);
    if (g.series.terms_used > 0) row.series = g.series;
  }
  return row;
}

std::vector<double> default_eps(const HurstPair& h, const DomainSpec& d, const ModelChoices& m) {
  std::vector<double> out;
  if (d.compact()) return {2.5, 3.0, 4.0, 6.0};
  auto add = [&](double thr) {
    if (std::isfinite(thr)) out.push_back(1.5 * thr);
  };
  if (d.kind == Kind::plane) {
    add(thm35_threshold(h, m.schedule, m.normalizer));
    add(cor36_threshold(h, m.schedule, m.normalizer));
  } else {
    add(thm47_threshold(h, m.phi));
    add(cor48_threshold(h, m.phi));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw std::invalid_argument("no family has a finite validity threshold here");
  return out;
}

McSetup mc_setup(const HurstPair& h, const DomainSpec& d, const ModelChoices& m, long n1, long n2) {
  McSetup s;
  if (d.compact()) {
    s.grid = Grid2::uniform(d.rect, n1, n2);
    s.weight = [](const Point2&) { return 1.0; };
    s.region = d.describe() + " uniform " + std::to_string(n1) + "x" + std::to_string(n2);
    return s;
  }
  if (d.kind == Kind::plane) {
    const double e3 = std::exp(3.0);
    s.grid = Grid2::log_spaced(Rect::make(1.0 / e3, e3, 1.0 / e3, e3), n1, n2);
    const double hs = h.h_sum();
    const Normalizer c = m.normalizer;
    s.weight = [hs, c](const Point2& t) {
      const double mx = std::max(t.t1, t.t2);
      return std::pow(mx, hs) * c(mx);
    };
    s.region = "[e^-3,e^3]^2 log-spaced " + std::to_string(n1) + "x" + std::to_string(n2);
    return s;
  }
  s.grid = Grid2::log_spaced(Rect::make(1.0, 64.0, 1.0, 64.0), n1, n2);
  const WeightFn phi = m.phi;
  s.weight = [h, phi](const Point2& t) {
    return std::pow(t.t1, h.h1()) * std::pow(t.t2, h.h2()) * phi(t.t1, t.t2);
  };
  s.region = "[1,2^6]^2 log-spaced " + std::to_string(n1) + "x" + std::to_string(n2);
  return s;
}

}  // namespace sheet_extremes::cli
