#include "oracles/oracles.hpp"
#include "sheet_extremes/global_bounds.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sheet_extremes;

namespace {

constexpr double kE = std::numbers::e;
const GrowthSchedule kExp = GrowthSchedule::exponential();
const Normalizer kLogLog = Normalizer::loglog();

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Full-scale log of the thm35 series form over k < K for b_k = e^k and the loglog normalizer.
double thm35_log_oracle(const HurstPair& h, double eps, long K) {
  const double hm = h.h_min(), s = h.h_sum();
  const double c = 3.0 / (2.0 * (std::pow(4.0, 1 - hm) + 3.0));
  const double lsum = oracle::log_sum(K, [&](long k) {
    const double w2 = std::exp(-2 * s) * std::log(double(k) + kE);
    return -c * eps * eps * w2 + (2.0 / hm) * std::log(w2);
  });
  return std::log(16.0) + 2.0 / hm + 0.5 + (4.0 / hm) * std::log(eps) + lsum;
}

// thm47 for the built-in weights over the first J shells (diagonals for phi1,
// squares for phi2).
double thm47_log_oracle(const HurstPair& h, WeightFn::Kind kind, double eps, long J) {
  const double q = oracle::q(h.h1(), h.h2()), c2 = oracle::c2(h.h1(), h.h2());
  auto term = [&](long n, long m) {
    const double f = kind == WeightFn::Kind::phi1 ? oracle::phi1_sq(n, m) : oracle::phi2_sq(n, m);
    return q * std::log(f) - c2 * eps * eps * f;
  };
  const double lsum = kind == WeightFn::Kind::phi1 ? oracle::log_sum_diagonals(J, term) : oracle::log_sum_square(J, term);
  return std::log(oracle::c1(h.h1(), h.h2())) + 2 * q * std::log(eps) + lsum;
}

// log of the reported partial sum alone (bound scaled by partial / (partial + tail)).
double log_partial(const GlobalBound& g) {
  return *g.result.log_value + std::log(g.series.partial_sum / g.series.bound());
}

TEST(Schedule, MConstant) {
  for (const HurstPair h : {HurstPair(0.5, 0.5), HurstPair(0.2, 0.7), HurstPair(0.9, 0.6)}) {
    EXPECT_LE(rel(schedule_m_constant(h, kExp, kLogLog).value, std::exp(-h.h_sum())), 1e-14);
    EXPECT_LE(rel(schedule_m_constant(h, GrowthSchedule::geometric(2), Normalizer::constant(1)).value,
                  std::pow(2.0, -h.h_sum())),
              1e-14);
  }
  EXPECT_NEAR(schedule_m_constant(HurstPair(0.5, 0.5), kExp, kLogLog).value, 0.36787944117144233, 1e-15);
  EXPECT_THROW(GrowthSchedule::geometric(1.0), std::invalid_argument);
}

TEST(Thm35, ThresholdAndInvalidRows) {
  const HurstPair h(0.5, 0.5);
  const double m = std::exp(-1.0);
  EXPECT_FALSE(global_bound_thm35(h, kExp, kLogLog, 2 / m).result.valid());
  EXPECT_FALSE(global_bound_thm35(h, kExp, kLogLog, 2 / m).result.value.has_value());
  const double thr = thm35_threshold(h, kExp, kLogLog);
  EXPECT_TRUE(global_bound_thm35(h, kExp, kLogLog, thr * 1.01).result.valid());
  EXPECT_FALSE(global_bound_thm35(h, kExp, kLogLog, thr * 0.99).result.valid());
  const GlobalBound flat = global_bound_thm35(h, kExp, Normalizer::constant(1.0), 50);
  EXPECT_FALSE(flat.result.valid());
  EXPECT_NE(flat.result.violations().find("series decays"), std::string::npos);
}

TEST(Thm35, MatchesBruteForceSeries) {
  for (const HurstPair h : {HurstPair(0.5, 0.5), HurstPair(0.3, 0.7), HurstPair(0.8, 0.4)}) {
    for (double scale : {1.05, 1.5, 3.0}) {
      const double eps = scale * thm35_threshold(h, kExp, kLogLog);
      const GlobalBound g = global_bound_thm35(h, kExp, kLogLog, eps);
      ASSERT_TRUE(g.result.valid()) << g.result.violations();
      const long K = g.series.terms_used;
      EXPECT_LE(std::abs(log_partial(g) - thm35_log_oracle(h, eps, K)), 1e-10);
      // the reported value bounds the series summed well past the truncation
      EXPECT_LE(thm35_log_oracle(h, eps, 8 * K), *g.result.log_value + 1e-12);
    }
  }
}

TEST(Cor36, FormulaAndRelaxation) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> hu(0.1, 0.9), su(1.01, 4.0);
  for (int i = 0; i < 30; ++i) {
    const HurstPair h(hu(rng), hu(rng));
    const double eps = su(rng) * cor36_threshold(h, kExp, kLogLog);
    const GlobalBound c = global_bound_cor36(h, kExp, kLogLog, eps);
    const GlobalBound t = global_bound_thm35(h, kExp, kLogLog, eps);
    ASSERT_TRUE(c.result.valid() && t.result.valid());
    EXPECT_GE(*c.result.log_value, *t.result.log_value - 1e-12);
    // same value as the worked example on its inputs
    const GlobalBound e = example1_bound(h, eps);
    EXPECT_LE(std::abs(*e.result.log_value - *c.result.log_value), 1e-10);
    // prefactor 16 e^{1/2} (e/2)^{2/H}, series of v_k^{2/H} e^{-v_k}
    const double hm = h.h_min(), a = 2 / hm, mm = std::exp(-h.h_sum());
    const double u = 3 * mm * mm / (4 * (std::pow(4.0, 1 - hm) + 3));
    const long K = c.series.terms_used;
    const double lsum = oracle::log_sum(K, [&](long k) {
      const double v = 2 * std::log(double(k) + kE);
      return a * std::log(v) - v;
    });
    const double ref = std::log(16.0) + 0.5 + a * std::log(kE / 2) + 2 * a * std::log(eps) + lsum +
                       2 * a * std::log(mm) - u * eps * eps;
    EXPECT_LE(std::abs(log_partial(c) - ref), 1e-10);
  }
}

TEST(Cor36, SqrtTwoPrefactorWouldBreakTheOrdering) {
  // A steep schedule puts nearly all the mass on k = 0, where the termwise
  // relaxation is tight; 16 sqrt(2) then lands below the parent.
  const GrowthSchedule steep = GrowthSchedule::geometric(1e30);
  const HurstPair h(0.95, 0.95);
  const double eps = 1.000001 * cor36_threshold(h, steep, kLogLog);
  const double ours = *global_bound_cor36(h, steep, kLogLog, eps).result.log_value;
  const double with_sqrt2 = ours + std::log(std::sqrt(2.0)) - 0.5;
  const double parent = *global_bound_thm35(h, steep, kLogLog, eps).result.log_value;
  EXPECT_GE(ours, parent);
  EXPECT_LT(with_sqrt2, parent);
}

TEST(Cor36, ThresholdIdentity) {
  for (const HurstPair h : {HurstPair(0.5, 0.5), HurstPair(0.25, 0.6), HurstPair(0.9, 0.35)}) {
    const double m = std::exp(-h.h_sum());
    const double thr = (2 / m) * std::sqrt(2 * (std::pow(4.0, 1 - h.h_min()) + 3) / 3);
    EXPECT_LE(rel(cor36_threshold(h, kExp, kLogLog), thr), 1e-12);
    EXPECT_TRUE(global_bound_cor36(h, kExp, kLogLog, thr * (1 + 1e-9)).result.valid());
    EXPECT_FALSE(global_bound_cor36(h, kExp, kLogLog, thr * (1 - 1e-9)).result.valid());
  }
}

TEST(Example1, Constants) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> hu(0.05, 0.95);
  for (int i = 0; i < 10; ++i) {
    const HurstPair h(hu(rng), hu(rng));
    const double m = schedule_m_constant(h, kExp, kLogLog).value;
    EXPECT_LE(rel(m, std::exp(-h.h_sum())), 1e-12);
    EXPECT_LE(rel(cor36_u(h, m), 3 * std::exp(-2 * h.h_sum()) / (4 * (std::pow(4.0, 1 - h.h_min()) + 3))), 1e-12);
    for (long k : {0L, 1L, 7L, 100L, 5000L}) {
      const double w = schedule_weight(h, kExp, kLogLog, k);
      EXPECT_LE(rel(2 * w * w / (m * m), 2 * std::log(double(k) + kE)), 1e-12);
    }
  }
  EXPECT_NEAR(cor36_u(HurstPair(0.5, 0.5), std::exp(-1.0)), 3 * std::exp(-2.0) / 20, 1e-15);
  EXPECT_NEAR(3 * std::exp(-2.0) / 20, 0.0203003, 1e-7);
}

TEST(Thm47, ThresholdsAndInvalid) {
  const HurstPair h(0.5, 0.5);
  EXPECT_FALSE(quadrant_bound_thm47(h, WeightFn::phi1(), 2.0).result.valid());
  const GlobalBound flat = quadrant_bound_thm47(h, WeightFn::constant(3.0), 50.0);
  EXPECT_FALSE(flat.result.valid());
  EXPECT_NE(flat.result.violations().find("series decays"), std::string::npos);
  for (const WeightFn phi : {WeightFn::phi1(), WeightFn::phi2()}) {
    const double thr = thm47_threshold(h, phi);
    EXPECT_TRUE(quadrant_bound_thm47(h, phi, thr * 1.001).result.valid());
    EXPECT_FALSE(quadrant_bound_thm47(h, phi, thr * 0.999).result.valid());
  }
}

TEST(Thm47, Phi1MatchesBruteForceAtEqualTruncation) {
  const HurstPair h(0.5, 0.5);
  const GlobalBound g = quadrant_bound_thm47(h, WeightFn::phi1(), 6.0);
  ASSERT_TRUE(g.result.valid()) << g.result.violations();
  const long n = g.series.terms_used;
  const long J = std::lround((std::sqrt(8.0 * n + 1) - 1) / 2);
  ASSERT_EQ(J * (J + 1) / 2, n);
  EXPECT_LE(std::abs(log_partial(g) - thm47_log_oracle(h, WeightFn::Kind::phi1, 6.0, J)), 1e-9);
  EXPECT_LE(thm47_log_oracle(h, WeightFn::Kind::phi1, 6.0, 3 * J), *g.result.log_value + 1e-12);
}

TEST(Thm47, Phi2MatchesBruteForce) {
  for (const HurstPair h : {HurstPair(0.5, 0.5), HurstPair(0.3, 0.8)}) {
    for (double scale : {1.05, 2.0}) {
      const double eps = scale * thm47_threshold(h, WeightFn::phi2());
      const GlobalBound g = quadrant_bound_thm47(h, WeightFn::phi2(), eps);
      ASSERT_TRUE(g.result.valid());
      const long J = std::lround(std::sqrt(double(g.series.terms_used)));
      ASSERT_EQ(J * J, g.series.terms_used);
      EXPECT_LE(std::abs(log_partial(g) - thm47_log_oracle(h, WeightFn::Kind::phi2, eps, J)), 1e-9);
      const long big = std::min(4 * J, 3000L);
      EXPECT_LE(thm47_log_oracle(h, WeightFn::Kind::phi2, eps, big), *g.result.log_value + 1e-12);
    }
  }
}

TEST(Cor48, RelaxationAndExample2) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> hu(0.1, 0.9), su(1.01, 3.0);
  for (int i = 0; i < 12; ++i) {
    const HurstPair h(hu(rng), hu(rng));
    // plain phi1 has no convergent cor48 series; its scaled variant does
    for (const WeightFn phi : {WeightFn::phi1(0.5), WeightFn::phi2()}) {
      const double eps = su(rng) * std::max(cor48_threshold(h, phi), thm47_threshold(h, phi));
      const GlobalBound c = quadrant_bound_cor48(h, phi, eps);
      const GlobalBound t = quadrant_bound_thm47(h, phi, eps);
      ASSERT_TRUE(c.result.valid() && t.result.valid()) << c.result.violations() << t.result.violations();
      EXPECT_GE(*c.result.log_value, *t.result.log_value - 1e-12);
    }
    const double eps = su(rng) * example2_threshold(h, WeightFn::Kind::phi2);
    const GlobalBound ex = example2_bounds(h, WeightFn::Kind::phi2, eps);
    const GlobalBound c = quadrant_bound_cor48(h, WeightFn::phi2(), eps);
    ASSERT_TRUE(ex.result.valid());
    EXPECT_LE(std::abs(*ex.result.log_value - *c.result.log_value), 1e-10);
  }
}

TEST(Example2, Phi1PrintedSeriesDiverges) {
  const GlobalBound g = example2_bounds(HurstPair(0.5, 0.5), WeightFn::Kind::phi1, 30.0);
  EXPECT_FALSE(g.result.valid());
  EXPECT_TRUE(std::isinf(example2_threshold(HurstPair(0.5, 0.5), WeightFn::Kind::phi1)));
  // shell sums of (ln(j+e))^Q (j+1)/(j+e)^2 do not shrink fast enough: partial sums keep growing like ln J
  const double q = 4.0;
  auto partial = [&](long J) {
    double s = 0;
    for (long j = 0; j < J; ++j) s += (j + 1) * std::pow(std::log(j + kE), q) / std::pow(j + kE, 2);
    return s;
  };
  EXPECT_GT(partial(20000) - partial(10000), partial(10000) - partial(5000));
}

TEST(Example2, TermwiseForms) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> hu(0.05, 0.95);
  const HurstPair h(hu(rng), hu(rng));
  const double q = h.q();
  const WeightFn p1 = WeightFn::phi1(), p2 = WeightFn::phi2();
  const double th1 = cor48_reference_sq(p1), th2 = cor48_reference_sq(p2);
  EXPECT_EQ(th1, 1.0);
  EXPECT_EQ(th2, 1.0);
  EXPECT_DOUBLE_EQ(p2.dyadic_sq(0, 0), 2.0);  // phi2(1,1) = sqrt 2
  for (long n = 0; n <= 100; ++n)
    for (long m = 0; m <= 100; ++m) {
      const double t1 = std::pow(p1.dyadic_sq(n, m), q) * std::exp(-2 * p1.dyadic_sq(n, m) / th1);
      const double r1 = std::pow(std::log(n + m + kE), q) / std::pow(n + m + kE, 2);
      ASSERT_LE(rel(t1, r1), 1e-12);
      const double t2 = std::pow(p2.dyadic_sq(n, m), q) * std::exp(-2 * p2.dyadic_sq(n, m) / th2);
      const double r2 = std::pow(std::log((n + kE) * (m + kE)), q) / (std::pow(n + kE, 2) * std::pow(m + kE, 2));
      ASSERT_LE(rel(t2, r2), 1e-12);
    }
  EXPECT_DOUBLE_EQ(std::pow(std::log(kE), q) / (kE * kE), std::exp(-2.0));
}

TEST(WeightFn, DyadicValuesMatchDirectEvaluation) {
  for (const WeightFn phi : {WeightFn::phi1(), WeightFn::phi2(), WeightFn::phi1(0.5), WeightFn::phi2(0.0)}) {
    for (long n = 0; n < 20; ++n)
      for (long m = 0; m < 20; ++m) {
        const double x = phi(std::ldexp(1.0, n), std::ldexp(1.0, m));
        EXPECT_LE(rel(x * x, phi.dyadic_sq(n, m)), 1e-13);
      }
  }
  EXPECT_DOUBLE_EQ(WeightFn::phi1().at_one(), 1.0);
  EXPECT_DOUBLE_EQ(WeightFn::phi1(0.5).scale_sq(), 2.5);
}

TEST(Series, DecreasingInEps) {
  // eps^k e^{-u eps^2} decreases past eps = sqrt(k / u); with u eps_thr^2 = 2
  // that is eps_thr sqrt(k / 2)
  const HurstPair h(0.4, 0.6);
  auto check = [](auto f, double from) {
    double prev = INFINITY;
    for (double s : {1.0, 1.2, 1.6, 2.5, 4.0}) {
      const GlobalBound g = f(s * from);
      ASSERT_TRUE(g.result.valid());
      EXPECT_LT(*g.result.log_value, prev);
      prev = *g.result.log_value;
    }
  };
  const double t36 = cor36_threshold(h, kExp, kLogLog);
  const double t48 = cor48_threshold(h, WeightFn::phi2());
  check([&](double e) { return global_bound_thm35(h, kExp, kLogLog, e); }, 1.1 * t36);
  check([&](double e) { return global_bound_cor36(h, kExp, kLogLog, e); }, t36 * std::sqrt(1.0 / h.h_min()));
  check([&](double e) { return quadrant_bound_thm47(h, WeightFn::phi2(), e); }, 1.1 * t48);
  check([&](double e) { return quadrant_bound_cor48(h, WeightFn::phi2(), e); }, t48 * std::sqrt(h.q() / 2));
}

TEST(Series, DoublingBudgetStaysWithinTail) {
  const HurstPair h(0.5, 0.5);
  const double eps = 1.5 * cor48_threshold(h, WeightFn::phi2());
  SeriesOptions a;
  a.max_terms = 4096;
  SeriesOptions b = a;
  b.max_terms = 2 * a.max_terms;
  const GlobalBound ga = quadrant_bound_cor48(h, WeightFn::phi2(), eps, a);
  const GlobalBound gb = quadrant_bound_cor48(h, WeightFn::phi2(), eps, b);
  ASSERT_TRUE(std::isfinite(ga.series.tail_estimate));
  EXPECT_LE(gb.series.bound(), ga.series.bound());
  EXPECT_LE(ga.series.bound() - gb.series.bound(), ga.series.tail_estimate);
}

TEST(Series, PowerTailAgainstIntegral) {
  // sum_{k > K} (ln(k+e))^a (k+e)^{-b} vs the certified bound
  const double a = 3.0, b = 2.0;
  for (long K : {100L, 1000L}) {
    double direct = 0;
    for (long k = K + 1; k < 4000000; ++k) direct += std::pow(std::log(k + kE), a) * std::pow(k + kE, -b);
    const double bound = log_power_tail(0.0, a, b, 1.0, K);
    EXPECT_GE(bound, direct);
    EXPECT_LE(bound, 1.5 * direct + 1e-3);
  }
  EXPECT_TRUE(std::isinf(log_power_tail(0.0, 1.0, 1.0, 1.0, 10)));
}

}  // namespace
