#include "cli/commands.hpp"

#include "cli/campaign.hpp"
#include "cli/output.hpp"
#include "sheet_extremes/metrics.hpp"
#include "sheet_extremes/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sheet_extremes::cli {

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Options {
  std::vector<std::string> hurst{"0.5,0.5"};
  std::string domain;  // empty: inferred from --family, else unit
  std::vector<std::string> families;
  std::vector<double> eps;
  std::optional<double> p;
  long paths = 100000;
  std::uint64_t seed = 0;
  std::string grid = "64x64";
  std::string schedule = "exp";
  std::string normalizer = "loglog";
  std::string phi = "phi2";
  std::optional<double> delta;
  std::optional<double> mu;
  double tol = 1e-8;
  long max_terms = 0;
  std::string out;
  std::string format = "csv";
  int workers = 1;
  // verify
  bool paper_eq7 = false;
  bool covering_sweep = false;
  // report
  std::string in;
};

void add_model_flags(CLI::App* sub, Options& o) {
  sub->add_option("--h", o.hurst, "Hurst pair H1,H2 (repeat for several)")->capture_default_str();
  sub->add_option("--domain", o.domain,
                  "unit | rect:T1,T2 | square12 | quadrant | plane (default: the one every --family fits, "
                  "else unit)");
  sub->add_option("--schedule", o.schedule, "geometric:r | exp")->capture_default_str();
  sub->add_option("--normalizer", o.normalizer, "loglog | constant:c")->capture_default_str();
  sub->add_option("--phi", o.phi, "phi1 | phi2 | constant:c")->capture_default_str();
  sub->add_option("--delta", o.delta, "scale phi by sqrt(2 + delta)");
  sub->add_option("--mu", o.mu, "exponent of the generic entropy bound");
  sub->add_option("--tol", o.tol, "relative series tolerance")->capture_default_str();
  sub->add_option("--max-terms", o.max_terms, "series term budget (0: default)");
}

void add_output_flags(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "output file (default: standard output)");
  sub->add_option("--format", o.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void add_mc_flags(CLI::App* sub, Options& o) {
  sub->add_option("--paths", o.paths, "Monte Carlo paths")->capture_default_str();
  sub->add_option("--seed", o.seed, "random seed")->envname("SHEET_EXTREMES_SEED")->capture_default_str();
  sub->add_option("--grid", o.grid, "grid size N1xN2")->capture_default_str();
  sub->add_option("--workers", o.workers, "worker threads")->capture_default_str();
}

ModelChoices model(const Options& o) {
  ModelChoices m;
  m.schedule = parse_schedule(o.schedule);
  m.normalizer = parse_normalizer(o.normalizer);
  m.phi = parse_weight(o.phi, o.delta);
  m.series.tol = o.tol;
  m.series.max_terms = o.max_terms;
  m.mu = o.mu;
  return m;
}

std::vector<HurstPair> hurst_list(const Options& o) {
  std::vector<HurstPair> out;
  for (const auto& s : o.hurst) out.push_back(parse_hurst(s));
  return out;
}

std::vector<std::string> family_list(const Options& o, const DomainSpec& d) {
  if (o.families.empty()) return default_families(d);
  std::vector<std::string> out;
  for (const auto& f : o.families) out.push_back(canonical_family(f));
  return out;
}

DomainSpec domain_of(const Options& o) {
  if (!o.domain.empty() || o.families.empty()) return parse_domain(o.domain.empty() ? "unit" : o.domain);
  for (const char* name : {"unit", "square12", "quadrant", "plane"}) {
    const DomainSpec d = parse_domain(name);
    bool all = true;
    for (const auto& f : o.families) all = all && family_fits(canonical_family(f), d);
    if (all) return d;
  }
  return parse_domain("unit");
}

std::string flag(bool b) { return b ? "true" : "false"; }

void write_table(const Options& o, const std::string& command, const Table& t) {
  std::ostringstream os;
  if (o.format == "json") {
    Json j = Json::object();
    j["version"] = kSchemaVersion;
    j["command"] = command;
    j["rows"] = t.to_json();
    os << j.dump(2) << "\n";
  } else {
    t.write_csv(os);
  }
  emit(o.out, os.str());
}

McConfig mc_config(const Options& o) {
  if (o.paths < 1) throw UsageError("--paths must be >= 1");
  if (o.workers < 1) throw UsageError("--workers must be >= 1");
  return McConfig{o.paths, o.seed, o.workers};
}

int cmd_bound(const Options& o) {
  const DomainSpec d = domain_of(o);
  const ModelChoices m = model(o);
  Table t({"schema_version", "h1", "h2", "domain", "family", "eps", "p", "value", "log_value", "valid",
           "vacuous", "underflow", "violations", "series_terms", "series_tail", "series_converged"});
  if (o.eps.empty()) throw UsageError("bound needs --eps");
  for (const auto& h : hurst_list(o))
    for (const auto& f : family_list(o, d))
      for (double eps : o.eps) {
        const BoundRow r = evaluate_bound(f, h, d, eps, m, o.p);
        const BoundResult& b = r.result;
        t.add({std::to_string(kSchemaVersion), num(h.h1()), num(h.h2()), d.describe(), b.family, num(eps),
               num(r.p), num(b.value), num(b.log_value), flag(b.valid()), flag(b.vacuous),
               flag(b.underflow), b.violations(),
               r.series ? std::to_string(r.series->terms_used) : "",
               r.series ? num(r.series->tail_estimate) : "", r.series ? flag(r.series->converged) : ""});
      }
  write_table(o, "bound", t);
  return kExitOk;
}

int cmd_optimize(const Options& o) {
  const DomainSpec d = domain_of(o);
  if (!d.compact()) throw UsageError("optimize supports compact domains only");
  if (o.eps.empty()) throw UsageError("optimize needs --eps");
  Table t({"schema_version", "h1", "h2", "domain", "eps", "family", "p", "value", "evaluations",
           "bracket_lo", "bracket_hi", "prescan_fallback", "selected"});
  const std::string v = std::to_string(kSchemaVersion);
  for (const auto& h : hurst_list(o))
    for (double eps : o.eps) {
      if (!o.families.empty()) {
        for (const auto& name : o.families) {
          const auto f = parse_parametric_family(name);
          if (!f) throw UsageError(name + " is not a parametric family (eq9, eq10, eq15, eq17)");
          const OptimizationReport r = optimize_p(*f, h, d.rect, eps);
          t.add({v, num(h.h1()), num(h.h2()), d.describe(), num(eps), r.family, num(r.best_p),
                 num(r.best_value), std::to_string(r.evaluations), num(r.bracket.first),
                 num(r.bracket.second), flag(r.prescan_fallback), "true"});
        }
        continue;
      }
      const OptimizationReport r = best_bound(h, d.rect, eps);
      for (const auto& c : r.compared_families)
        t.add({v, num(h.h1()), num(h.h2()), d.describe(), num(eps), c.family, num(c.p), num(c.value),
               "", "", "", "", flag(c.family == r.family)});
    }
  write_table(o, "optimize", t);
  return kExitOk;
}

int cmd_certify(const Options& o) {
  const DomainSpec d = domain_of(o);
  const ModelChoices m = model(o);
  const McConfig cfg = mc_config(o);
  const auto [n1, n2] = parse_grid(o.grid);
  Table t({"schema_version", "h1", "h2", "domain", "mc_region", "n_paths", "seed", "eps", "hits", "p_hat",
           "ci99_low", "ci99_high", "family", "p", "bound", "valid", "vacuous", "dominated", "violations"});
  bool violated = false;
  for (const auto& h : hurst_list(o)) {
    std::vector<double> eps = o.eps.empty() ? default_eps(h, d, m) : o.eps;
    std::sort(eps.begin(), eps.end());
    const McSetup setup = mc_setup(h, d, m, n1, n2);
    std::cerr << "certify: h=(" << num(h.h1()) << "," << num(h.h2()) << ") " << setup.region << ", "
              << cfg.n_paths << " paths" << std::endl;
    const auto start = std::chrono::steady_clock::now();
    const auto tails = empirical_sup_tail(h, setup.grid, setup.weight, eps, cfg);
    std::cerr << "certify: sampling took "
              << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s"
              << std::endl;
    for (const auto& te : tails)
      for (const auto& f : family_list(o, d)) {
        if (f == "eq11") continue;  // bounds a rescaled sup, not the simulated one
        const BoundRow r = evaluate_bound(f, h, d, te.eps, m, o.p);
        const BoundResult& b = r.result;
        std::string dominated;
        if (b.valid()) {
          const bool ok = te.ci99_high <= *b.value;
          dominated = flag(ok);
          violated = violated || !ok;
        }
        t.add({std::to_string(kSchemaVersion), num(h.h1()), num(h.h2()), d.describe(), setup.region,
               std::to_string(te.n_paths), std::to_string(cfg.seed), num(te.eps), std::to_string(te.hits),
               num(te.p_hat), num(te.ci99_low), num(te.ci99_high), b.family, num(r.p), num(b.value),
               flag(b.valid()), flag(b.vacuous), dominated, b.violations()});
      }
  }
  write_table(o, "certify", t);
  return violated ? kExitFailure : kExitOk;
}

int cmd_verify(const Options& o) {
  const ModelChoices m = model(o);
  if (o.paths < 0) throw UsageError("--paths must be >= 0");
  const McConfig cfg = o.paths > 0 ? mc_config(o) : McConfig{1, o.seed, 1};
  const auto [n1, n2] = parse_grid(o.grid);
  VerifyOptions vo;
  vo.use_paper_eq7_exponent = o.paper_eq7;
  vo.empirical = o.paths > 0;

  Table checks({"schema_version", "h1", "h2", "check", "passed", "worst_error", "tolerance", "cases"});
  const std::string v = std::to_string(kSchemaVersion);
  bool ok = true;
  for (const auto& h : hurst_list(o)) {
    const IdentityReport rep = verify_model_identities(h, Grid2::uniform(Rect::unit(), n1, n2), cfg, vo);
    for (const auto& c : rep.checks) {
      ok = ok && c.passed;
      checks.add({v, num(h.h1()), num(h.h2()), c.name, flag(c.passed), num(c.worst_error), num(c.tolerance),
                  std::to_string(c.cases)});
    }

    // relaxations never undercut what they relax, on a grid above each threshold
    auto ordering = [&](const std::string& name, double thr, auto lower, auto upper) {
      double worst = 0.0;
      long cases = 0;
      if (std::isfinite(thr))
        for (double s : {1.05, 1.2, 1.5, 2.0, 3.0}) {
          const BoundResult lo = lower(s * thr);
          const BoundResult hi = upper(s * thr);
          if (!lo.log_value || !hi.log_value) continue;
          ++cases;
          worst = std::max(worst, *lo.log_value - *hi.log_value);
        }
      const bool pass = worst <= 1e-12;
      ok = ok && pass;
      checks.add({v, num(h.h1()), num(h.h2()), name, flag(pass), num(worst), num(1e-12), std::to_string(cases)});
    };
    ordering(
        "cor36_dominates_thm35", cor36_threshold(h, m.schedule, m.normalizer),
        [&](double e) { return global_bound_thm35(h, m.schedule, m.normalizer, e, m.series).result; },
        [&](double e) { return global_bound_cor36(h, m.schedule, m.normalizer, e, m.series).result; });
    ordering(
        "cor48_dominates_thm47", cor48_threshold(h, m.phi),
        [&](double e) { return quadrant_bound_thm47(h, m.phi, e, m.series).result; },
        [&](double e) { return quadrant_bound_cor48(h, m.phi, e, m.series).result; });
    ordering(
        "eq12_dominates_eq10", 2.0,
        [&](double e) { return bound_unit_square_rho1(h, 1.0 / (e * e), e); },
        [&](double e) { return bound_unit_square_eps(h, e); });
    ordering(
        "eq16_dominates_eq15", 2.0,
        [&](double e) { return bound_rect_rho2(h, Rect::unit(), 1.0 / (e * e), e); },
        [&](double e) { return bound_rect_rho2_eps(h, Rect::unit(), e); });
    ordering(
        "eq18_dominates_eq17", 2.0,
        [&](double e) { return bound_square12_rho2(h, 1.0 / (e * e), e); },
        [&](double e) { return bound_square12_eps(h, e); });
  }

  Table cover({"schema_version", "metric", "h1", "h2", "radius", "formula", "packing", "consistent"});
  if (o.covering_sweep) {
    for (const auto& h : hurst_list(o))
      for (int k = 0; k < 12; ++k) {
        const double u = 0.5 * std::pow(25.0, -k / 11.0);
        const Rect unit = Rect::unit();
        const double f1 = covering_bound_rho1(unit, PowerSigma(1.0, 1.0), u);
        const int p1 = packing_oracle(MaxMetric{}, unit, u, 128);
        const double f2 = covering_bound_rho2(h, unit, u);
        const int p2 = packing_oracle(HolderMetric{h}, unit, u, 128);
        ok = ok && p1 <= f1 && p2 <= f2;
        cover.add({v, "rho1", num(h.h1()), num(h.h2()), num(u), num(f1), std::to_string(p1), flag(p1 <= f1)});
        cover.add({v, "rho2", num(h.h1()), num(h.h2()), num(u), num(f2), std::to_string(p2), flag(p2 <= f2)});
      }
  }

  std::ostringstream os;
  if (o.format == "csv") {
    checks.write_csv(os);
    if (o.covering_sweep) {
      os << "\r\n";
      cover.write_csv(os);
    }
  } else {
    Json j = Json::object();
    j["version"] = kSchemaVersion;
    j["command"] = "verify";
    j["all_passed"] = ok;
    j["checks"] = checks.to_json();
    if (o.covering_sweep) j["covering"] = cover.to_json();
    os << j.dump(2) << "\n";
  }
  emit(o.out, os.str());
  return ok ? kExitOk : kExitFailure;
}

int cmd_report(const Options& o) {
  std::ifstream f(o.in, std::ios::binary);
  if (!f) throw UsageError("cannot open --in file '" + o.in + "'");
  const auto records = parse_csv(f);
  if (records.empty()) throw std::runtime_error("empty certify file");
  const auto& head = records.front();
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < head.size(); ++i)
      if (head[i] == name) return i;
    throw std::runtime_error("certify file lacks column " + name);
  };
  const std::size_t c_h1 = col("h1"), c_h2 = col("h2"), c_dom = col("domain"), c_fam = col("family"),
                    c_hi = col("ci99_high"), c_b = col("bound"), c_dm = col("dominated");

  struct Summary {
    long rows = 0, valid = 0, dominated = 0, violated = 0;
    double min_margin = std::numeric_limits<double>::infinity();  // log(bound / ci99_high)
  };
  std::map<std::tuple<std::string, std::string, std::string, std::string>, Summary> groups;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.size() != head.size()) throw std::runtime_error("malformed certify row " + std::to_string(i));
    Summary& s = groups[{r[c_h1], r[c_h2], r[c_dom], r[c_fam]}];
    ++s.rows;
    if (r[c_dm].empty()) continue;
    ++s.valid;
    if (r[c_dm] == "true") ++s.dominated;
    else ++s.violated;
    const double b = std::stod(r[c_b]);
    const double hi = std::stod(r[c_hi]);
    if (b > 0 && hi > 0) s.min_margin = std::min(s.min_margin, std::log(b / hi));
  }
  Table t({"schema_version", "h1", "h2", "domain", "family", "rows", "valid_rows", "dominated", "violated",
           "min_log_margin"});
  bool any_violation = false;
  for (const auto& [k, s] : groups) {
    any_violation = any_violation || s.violated > 0;
    t.add({std::to_string(kSchemaVersion), std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k),
           std::to_string(s.rows), std::to_string(s.valid), std::to_string(s.dominated),
           std::to_string(s.violated), s.valid ? num(s.min_margin) : ""});
  }
  write_table(o, "report", t);
  return any_violation ? kExitFailure : kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Tail bounds and Monte Carlo certification for sups of fractional Brownian sheets"};
  app.set_config("--config", "", "TOML file with option values; command-line flags take precedence");
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);

  Options bound_o, opt_o, cert_o, ver_o, rep_o;
  opt_o.format = "csv";
  ver_o.format = "json";
  ver_o.grid = "16x16";
  ver_o.paths = 20000;
  rep_o.format = "json";

  auto* bound = app.add_subcommand("bound", "evaluate bound families over an eps grid");
  add_model_flags(bound, bound_o);
  add_output_flags(bound, bound_o);
  bound->add_option("--family", bound_o.families, "family id (repeatable; default: all that apply)");
  bound->add_option("--eps", bound_o.eps, "thresholds")->delimiter(',');
  bound->add_option("--p", bound_o.p, "fixed p for parametric families (default: optimized)");

  auto* optimize = app.add_subcommand("optimize", "minimize parametric bounds over p");
  add_model_flags(optimize, opt_o);
  add_output_flags(optimize, opt_o);
  optimize->add_option("--family", opt_o.families, "eq9 | eq10 | eq15 | eq17 (default: best of all)");
  optimize->add_option("--eps", opt_o.eps, "thresholds")->delimiter(',');

  auto* certify = app.add_subcommand("certify", "Monte Carlo tail estimates against every applicable bound");
  add_model_flags(certify, cert_o);
  add_output_flags(certify, cert_o);
  add_mc_flags(certify, cert_o);
  certify->add_option("--family", cert_o.families, "family id (repeatable; default: all that apply)");
  certify->add_option("--eps", cert_o.eps, "thresholds (default depends on the domain)")->delimiter(',');
  certify->add_option("--p", cert_o.p, "fixed p for parametric families (default: optimized)");

  auto* verify = app.add_subcommand("verify", "model identities, sampler moments and bound orderings");
  add_model_flags(verify, ver_o);
  add_output_flags(verify, ver_o);
  add_mc_flags(verify, ver_o);
  verify->add_flag("--use-paper-eq7-exponent", ver_o.paper_eq7,
                   "use exponent 2*H2 on s1 in the vertical increment variance");
  verify->add_flag("--covering-sweep", ver_o.covering_sweep, "compare covering formulas with packings");

  auto* report = app.add_subcommand("report", "summarize a certify CSV");
  add_output_flags(report, rep_o);
  report->add_option("--in", rep_o.in, "certify CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*bound) return cmd_bound(bound_o);
    if (*optimize) return cmd_optimize(opt_o);
    if (*certify) return cmd_certify(cert_o);
    if (*verify) return cmd_verify(ver_o);
    if (*report) return cmd_report(rep_o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace sheet_extremes::cli
