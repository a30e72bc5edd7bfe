#include "sheet_extremes/optimizer.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sheet_extremes {

namespace {

constexpr int kScanPoints = 64;
constexpr double kWidth = 1e-9;
const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

bool same_rect(const Rect& r, double a1, double b1, double a2, double b2) {
  return near(r.t1_min, a1) && near(r.t1_max, b1) && near(r.t2_min, a2) && near(r.t2_max, b2);
}

// Rectangle the family is actually evaluated on.
Rect route(const Rect& rect) {
  if (classify_domain(rect) == DomainKind::square12) return Rect::origin(2.0, 2.0);
  return rect;
}

struct Evaluator {
  ParametricFamily family;
  const HurstPair& h;
  const Rect& rect;
  double eps;
  long count = 0;

  double operator()(double p) {
    ++count;
    const BoundResult r = evaluate_family(family, h, rect, p, eps);
    if (!r.log_value) throw std::runtime_error(r.family + ": invalid at p=" + std::to_string(p));
    return *r.log_value;
  }
};

}  // namespace

std::string family_name(ParametricFamily f) {
  switch (f) {
    case ParametricFamily::eq9:
      return "eq9";
    case ParametricFamily::eq10:
      return "eq10";
    case ParametricFamily::eq15:
      return "eq15";
    case ParametricFamily::eq17:
      return "eq17";
  }
  return "?";
}

std::optional<ParametricFamily> parse_parametric_family(std::string_view name) {
  for (auto f : {ParametricFamily::eq9, ParametricFamily::eq10, ParametricFamily::eq15,
                 ParametricFamily::eq17})
    if (family_name(f) == name) return f;
  return std::nullopt;
}

DomainKind classify_domain(const Rect& rect) {
  if (same_rect(rect, 0.0, 1.0, 0.0, 1.0)) return DomainKind::unit;
  if (same_rect(rect, 1.0, 2.0, 1.0, 2.0)) return DomainKind::square12;
  if (rect.anchored_at_origin() && rect.width1() >= 1.0 && rect.width2() >= 1.0) return DomainKind::rect;
  throw std::invalid_argument("unsupported domain shape");
}

bool family_applies(ParametricFamily f, const Rect& rect) {
  const DomainKind k = classify_domain(rect);
  switch (f) {
    case ParametricFamily::eq9:
      return route(rect).is_square();
    case ParametricFamily::eq10:
      return k == DomainKind::unit;
    case ParametricFamily::eq15:
      return true;
    case ParametricFamily::eq17:
      return k == DomainKind::square12;
  }
  return false;
}

BoundResult evaluate_family(ParametricFamily f, const HurstPair& h, const Rect& rect, double p,
                            double eps) {
  if (!family_applies(f, rect))
    throw std::invalid_argument(family_name(f) + " does not apply to this domain");
  const Rect target = route(rect);
  switch (f) {
    case ParametricFamily::eq9: {
      // max metric on [0,T]^2: sigma(h) = 2 T^{H1+H2-H} h^H, gamma = T^{H1+H2}
      const double t = target.width1();
      const double s = h.h_sum();
      const double c = 2.0 * std::pow(t, s - h.h_min());
      BoundResult r = bound_power_sigma(c, h.h_min(), t, std::pow(t, s), p, eps);
      return r;
    }
    case ParametricFamily::eq10:
      return bound_unit_square_rho1(h, p, eps);
    case ParametricFamily::eq15:
      return bound_rect_rho2(h, target, p, eps);
    case ParametricFamily::eq17:
      return bound_square12_rho2(h, p, eps);
  }
  throw std::logic_error("unknown family");
}

OptimizationReport optimize_p(ParametricFamily f, const HurstPair& h, const Rect& rect, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("optimize_p: eps must be > 0");
  if (!family_applies(f, rect))
    throw std::invalid_argument(family_name(f) + " does not apply to this domain");
  Evaluator eval{f, h, rect, eps};

  // Coarse scan, uniform in logit(p) so that p ~ 1/eps^2 is resolved for large eps.
  const double lo_logit = std::log(kPMin / (1.0 - kPMin));
  const double hi_logit = std::log(kPMax / (1.0 - kPMax));
  std::array<double, kScanPoints> ps{};
  std::array<double, kScanPoints> fs{};
  int best_i = 0;
  for (int i = 0; i < kScanPoints; ++i) {
    const double z = lo_logit + (hi_logit - lo_logit) * i / (kScanPoints - 1);
    ps[i] = 1.0 / (1.0 + std::exp(-z));
    fs[i] = eval(ps[i]);
    if (fs[i] < fs[best_i]) best_i = i;
  }

  auto golden = [&](double a, double b) {
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    while (b - a > kWidth) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = eval(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = eval(d);
      }
    }
    const double m = 0.5 * (a + b);
    return std::array<double, 4>{m, eval(m), a, b};
  };

  OptimizationReport rep;
  rep.family = family_name(f);
  auto g = golden(kPMin, kPMax);
  if (g[1] - fs[best_i] > std::log1p(1e-6)) {
    rep.prescan_fallback = true;
    const double a = ps[std::max(best_i - 1, 0)];
    const double b = ps[std::min(best_i + 1, kScanPoints - 1)];
    auto local = golden(a, b);
    g = local[1] <= fs[best_i] ? local : std::array<double, 4>{ps[best_i], fs[best_i], a, b};
  }
  rep.best_p = g[0];
  rep.best_log_value = g[1];
  rep.bracket = {g[2], g[3]};

  std::vector<double> anchors{0.5, 0.1};
  if (1.0 / (eps * eps) < 1.0) anchors.push_back(1.0 / (eps * eps));
  for (double p : anchors) {
    const double v = eval(p);
    if (v < rep.best_log_value) {
      rep.best_log_value = v;
      rep.best_p = p;
    }
  }
  rep.best_value = std::exp(rep.best_log_value);
  rep.evaluations = eval.count;
  rep.compared_families.push_back({rep.family, rep.best_p, rep.best_value, ""});
  return rep;
}

OptimizationReport best_bound(const HurstPair& h, const Rect& rect, double eps) {
  const DomainKind kind = classify_domain(rect);
  OptimizationReport best;
  best.best_log_value = std::numeric_limits<double>::infinity();
  std::vector<FamilyValue> table;

  auto consider = [&](const std::string& name, std::optional<double> p, const BoundResult& r,
                      long evals) {
    table.push_back({name, p, r.value, r.violations()});
    best.evaluations += evals;
    if (r.log_value && *r.log_value < best.best_log_value) {
      best.family = name;
      best.best_log_value = *r.log_value;
      best.best_p = p.value_or(1.0 / (eps * eps));
    }
  };

  if (eps > 0.0) {
    for (auto f : {ParametricFamily::eq9, ParametricFamily::eq10, ParametricFamily::eq15,
                   ParametricFamily::eq17}) {
      if (!family_applies(f, rect)) continue;
      const OptimizationReport o = optimize_p(f, h, rect, eps);
      BoundResult r;
      r.log_value = o.best_log_value;
      r.value = o.best_value;
      consider(o.family, o.best_p, r, o.evaluations);
    }
  }
  const Rect target = route(rect);
  if (kind == DomainKind::unit) consider("eq12", std::nullopt, bound_unit_square_eps(h, eps), 1);
  consider("eq16", std::nullopt, bound_rect_rho2_eps(h, target, eps), 1);
  if (kind == DomainKind::square12) consider("eq18", std::nullopt, bound_square12_eps(h, eps), 1);

  if (!std::isfinite(best.best_log_value))
    throw std::invalid_argument("best_bound: no valid bound for this domain and eps");
  best.best_value = std::exp(best.best_log_value);
  best.compared_families = std::move(table);
  return best;
}

}  // namespace sheet_extremes
