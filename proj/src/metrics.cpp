#include "sheet_extremes/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

namespace sheet_extremes {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Relative slack used when classifying lattice offsets against a radius.
constexpr double kBoundarySlack = 1e-12;

double combine(const MetricKind& metric, double d1, double d2) {
  return std::visit(overloaded{[&](const MaxMetric&) { return std::max(d1, d2); },
                               [&](const HolderMetric& m) {
                                 return abs_pow(d1, m.h.h1()) + abs_pow(d2, m.h.h2());
                               }},
                    metric);
}

void check_lattice_args(const Rect& rect, double u, int grid_res) {
  if (grid_res < 2) throw std::invalid_argument("grid_res must be >= 2");
  if (!(u > 0.0)) throw std::invalid_argument("radius must be > 0");
  (void)rect;
}

/// For each row offset di >= 0, the largest column offset dj with
/// dist(di*dx, dj*dy) <= radius, or -1 if even dj = 0 lies outside.
std::vector<int> ball_extents(const MetricKind& metric, const Rect& rect, int grid_res,
                              double radius, bool inclusive) {
  const double dx = rect.width1() / (grid_res - 1);
  const double dy = rect.width2() / (grid_res - 1);
  const double limit = inclusive ? radius * (1.0 + kBoundarySlack) : radius * (1.0 - kBoundarySlack);
  std::vector<int> ext(grid_res, -1);
  int dj = grid_res - 1;
  // Extents are non-increasing in di for both metrics, so one sweep suffices.
  for (int di = 0; di < grid_res; ++di) {
    while (dj >= 0 && combine(metric, di * dx, dj * dy) > limit) --dj;
    if (dj < 0) break;
    ext[di] = dj;
  }
  return ext;
}

}  // namespace

double distance(const MetricKind& metric, const Point2& t, const Point2& s) {
  return combine(metric, std::abs(t.t1 - s.t1), std::abs(t.t2 - s.t2));
}

PowerSigma::PowerSigma(double c_, double alpha_) : c(c_), alpha(alpha_) {
  if (!(c > 0.0)) throw std::invalid_argument("sigma constant C must be > 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("sigma exponent must lie in (0,1]");
}

double PowerSigma::operator()(double h) const { return c * abs_pow(h, alpha); }

double PowerSigma::inverse(double u) const { return std::pow(u / c, 1.0 / alpha); }

double covering_bound_rho1(const Rect& rect, const PowerSigma& sigma, double u) {
  if (!(u > 0.0)) throw std::invalid_argument("covering_bound_rho1: u must be > 0");
  if (!rect.is_square())
    throw std::invalid_argument("covering_bound_rho1: formula holds for square domains only");
  const double t = rect.width1();
  const double x = t * std::pow(sigma.c, 1.0 / sigma.alpha) / (2.0 * std::pow(u, 1.0 / sigma.alpha));
  return (x + 1.0) * (x + 1.0);
}

double covering_bound_rho2(const HurstPair& h, const Rect& rect, double u) {
  if (!(u > 0.0)) throw std::invalid_argument("covering_bound_rho2: u must be > 0");
  const double f1 = rect.width1() / (4.0 * h.k1() * std::pow(u, 1.0 / h.h1())) + 1.5;
  const double f2 = rect.width2() / (4.0 * h.k2() * std::pow(u, 1.0 / h.h2())) + 1.5;
  return 2.0 * f1 * f2;
}

int packing_oracle(const MetricKind& metric, const Rect& rect, double u, int grid_res) {
  check_lattice_args(rect, u, grid_res);
  const int n = grid_res;
  // A candidate is compatible with a chosen point iff their distance exceeds 2u;
  // block everything within 2u (with slack on the safe side).
  const std::vector<int> ext = ball_extents(metric, rect, n, 2.0 * u, true);
  int reach = 0;
  while (reach + 1 < n && ext[reach + 1] >= 0) ++reach;

  std::vector<std::uint8_t> blocked(static_cast<std::size_t>(n) * n, 0);
  int count = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (blocked[static_cast<std::size_t>(i) * n + j]) continue;
      ++count;
      for (int di = -reach; di <= reach; ++di) {
        const int r = i + di;
        if (r < 0 || r >= n) continue;
        const int e = ext[std::abs(di)];
        const int lo = std::max(0, j - e);
        const int hi = std::min(n - 1, j + e);
        std::fill(blocked.begin() + static_cast<std::ptrdiff_t>(r) * n + lo,
                  blocked.begin() + static_cast<std::ptrdiff_t>(r) * n + hi + 1, 1);
      }
    }
  }
  return count;
}

int covering_oracle(const MetricKind& metric, const Rect& rect, double u, int grid_res) {
  check_lattice_args(rect, u, grid_res);
  const int n = grid_res;
  const std::vector<int> ext = ball_extents(metric, rect, n, u, true);
  int reach = 0;
  while (reach + 1 < n && ext[reach + 1] >= 0) ++reach;

  std::vector<std::uint8_t> covered(static_cast<std::size_t>(n) * n, 0);
  // prefix[i*(n+1) + j] = number of uncovered points in row i with column < j
  std::vector<int> prefix(static_cast<std::size_t>(n) * (n + 1));
  auto rebuild_row = [&](int i) {
    int* p = &prefix[static_cast<std::size_t>(i) * (n + 1)];
    p[0] = 0;
    for (int j = 0; j < n; ++j) p[j + 1] = p[j] + (covered[static_cast<std::size_t>(i) * n + j] ? 0 : 1);
  };
  for (int i = 0; i < n; ++i) rebuild_row(i);

  auto gain = [&](int ci, int cj) {
    int g = 0;
    for (int di = -reach; di <= reach; ++di) {
      const int r = ci + di;
      if (r < 0 || r >= n) continue;
      const int e = ext[std::abs(di)];
      const int lo = std::max(0, cj - e);
      const int hi = std::min(n - 1, cj + e);
      const int* p = &prefix[static_cast<std::size_t>(r) * (n + 1)];
      g += p[hi + 1] - p[lo];
    }
    return g;
  };

  // Max-heap on gain; among equal gains the smaller lattice index wins.
  using Entry = std::pair<int, int>;  // (gain, -index)
  std::priority_queue<Entry> heap;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) heap.emplace(gain(i, j), -(i * n + j));

  long remaining = static_cast<long>(n) * n;
  int centres = 0;
  while (remaining > 0) {
    auto [stored, neg_idx] = heap.top();
    heap.pop();
    const int idx = -neg_idx;
    const int ci = idx / n;
    const int cj = idx % n;
    const int g = gain(ci, cj);
    if (g != stored) {
      // Stale entry; gains only shrink, so requeue with the fresh value.
      if (g > 0) heap.emplace(g, neg_idx);
      continue;
    }
    ++centres;
    for (int di = -reach; di <= reach; ++di) {
      const int r = ci + di;
      if (r < 0 || r >= n) continue;
      const int e = ext[std::abs(di)];
      const int lo = std::max(0, cj - e);
      const int hi = std::min(n - 1, cj + e);
      for (int j = lo; j <= hi; ++j) {
        auto& c = covered[static_cast<std::size_t>(r) * n + j];
        if (!c) {
          c = 1;
          --remaining;
        }
      }
      rebuild_row(r);
    }
  }
  return centres;
}

CoveringEstimate estimate_covering(const MetricKind& metric, const Rect& rect, double radius,
                                   double formula_bound, int grid_res, bool with_cover) {
  CoveringEstimate est;
  est.radius = radius;
  est.formula_bound = formula_bound;
  est.grid_resolution = grid_res;
  est.oracle_packing_count = packing_oracle(metric, rect, radius, grid_res);
  if (with_cover) est.oracle_cover_count = covering_oracle(metric, rect, radius, grid_res);
  return est;
}

}  // namespace sheet_extremes
