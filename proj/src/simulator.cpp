#include "sheet_extremes/simulator.hpp"

#include "sheet_extremes/philox.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sheet_extremes {

namespace {

void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) throw std::invalid_argument(std::string(name) + " is empty");
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!(axis[i] >= 0.0) || !std::isfinite(axis[i]))
      throw std::invalid_argument(std::string(name) + " has a negative or non-finite point");
    if (i > 0 && !(axis[i] > axis[i - 1]))
      throw std::invalid_argument(std::string(name) + " is not strictly increasing");
  }
}

std::vector<double> uniform_axis(double lo, double hi, long n) {
  if (n < 1) throw std::invalid_argument("grid size must be >= 1");
  std::vector<double> a(static_cast<std::size_t>(n));
  if (lo == 0.0) {
    for (long i = 0; i < n; ++i) a[i] = hi * static_cast<double>(i + 1) / static_cast<double>(n);
  } else if (n == 1) {
    a[0] = hi;
  } else {
    for (long i = 0; i < n; ++i)
      a[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    a.back() = hi;
  }
  return a;
}

std::vector<double> log_axis(double lo, double hi, long n) {
  if (n < 1) throw std::invalid_argument("grid size must be >= 1");
  if (!(lo > 0.0)) throw std::invalid_argument("log-spaced grid needs a positive lower corner");
  std::vector<double> a(static_cast<std::size_t>(n));
  if (n == 1) {
    a[0] = hi;
    return a;
  }
  const double ll = std::log(lo);
  const double lh = std::log(hi);
  for (long i = 0; i < n; ++i)
    a[i] = std::exp(ll + (lh - ll) * static_cast<double>(i) / static_cast<double>(n - 1));
  a.front() = lo;
  a.back() = hi;
  return a;
}

}  // namespace

Grid2 Grid2::make(std::vector<double> axis1, std::vector<double> axis2, long max_points) {
  check_axis(axis1, "axis1");
  check_axis(axis2, "axis2");
  if (static_cast<long>(axis1.size()) * static_cast<long>(axis2.size()) > max_points)
    throw std::invalid_argument("grid exceeds the configured point budget");
  return Grid2{std::move(axis1), std::move(axis2)};
}

Grid2 Grid2::uniform(const Rect& rect, long n1, long n2) {
  return make(uniform_axis(rect.t1_min, rect.t1_max, n1), uniform_axis(rect.t2_min, rect.t2_max, n2));
}

Grid2 Grid2::log_spaced(const Rect& rect, long n1, long n2) {
  return make(log_axis(rect.t1_min, rect.t1_max, n1), log_axis(rect.t2_min, rect.t2_max, n2));
}

AxisFactor axis_cov_factor(double hurst, const std::vector<double>& axis) {
  check_axis(axis, "axis");
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("hurst index must be in (0, 1)");
  AxisFactor out;
  while (out.zeros < static_cast<long>(axis.size()) && axis[out.zeros] == 0.0) ++out.zeros;
  const long n = static_cast<long>(axis.size()) - out.zeros;
  Eigen::MatrixXd r(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j <= i; ++j)
      r(i, j) = r(j, i) = axis_kernel(hurst, axis[out.zeros + i], axis[out.zeros + j]);
  if (n == 0) return out;

  const double scale = r.trace() / static_cast<double>(n);
  for (double rel : {0.0, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10}) {
    Eigen::MatrixXd a = r;
    a.diagonal().array() += rel * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
      out.lower = llt.matrixL();
      out.jitter = rel * scale;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "axis covariance factorization failed (H=" << hurst << ", n=" << n
      << ", smallest spacing=";
  double gap = axis[out.zeros];
  for (long i = out.zeros + 1; i < static_cast<long>(axis.size()); ++i) gap = std::min(gap, axis[i] - axis[i - 1]);
  msg << gap << ", jitter up to 1e-10 * trace/n)";
  throw std::runtime_error(msg.str());
}

FbsSampler::FbsSampler(const HurstPair& h, const Grid2& grid)
    : h_(h), grid_(grid), f1_(axis_cov_factor(h.h1(), grid.axis1)),
      f2_(axis_cov_factor(h.h2(), grid.axis2)) {}

void FbsSampler::sample(std::uint64_t seed, std::uint64_t path, Eigen::MatrixXd& out) const {
  const long p1 = f1_.lower.rows();
  const long p2 = f2_.lower.rows();
  Eigen::MatrixXd z(p1, p2);
  PhiloxStream rng(seed, path);
  for (long i = 0; i < p1; ++i)
    for (long j = 0; j < p2; ++j) z(i, j) = rng.next_normal();
  out.setZero(grid_.n1(), grid_.n2());
  if (p1 == 0 || p2 == 0) return;
  const Eigen::MatrixXd left = f1_.lower.triangularView<Eigen::Lower>() * z;
  out.bottomRightCorner(p1, p2).noalias() =
      left * f2_.lower.transpose().triangularView<Eigen::Upper>();
}

Eigen::MatrixXd FbsSampler::sample(std::uint64_t seed, std::uint64_t path) const {
  Eigen::MatrixXd out;
  sample(seed, path, out);
  return out;
}

void for_each_path(const FbsSampler& sampler, const McConfig& cfg,
                   const std::function<void(int, long, const Eigen::MatrixXd&)>& visit) {
  if (cfg.n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
  if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");
  const int workers = static_cast<int>(std::min<long>(cfg.workers, cfg.n_paths));
  auto run = [&](int w) {
    const long begin = cfg.n_paths * w / workers;
    const long end = cfg.n_paths * (w + 1) / workers;
    Eigen::MatrixXd x;
    for (long path = begin; path < end; ++path) {
      sampler.sample(cfg.seed, static_cast<std::uint64_t>(path), x);
      visit(w, path, x);
    }
  };
  if (workers == 1) {
    run(0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
  for (auto& t : pool) t.join();
}

std::vector<TailEstimate> empirical_sup_tail(const HurstPair& h, const Grid2& grid,
                                             const PointWeight& weight,
                                             const std::vector<double>& eps_list,
                                             const McConfig& cfg) {
  if (eps_list.empty()) throw std::invalid_argument("eps_list is empty");
  if (!std::is_sorted(eps_list.begin(), eps_list.end()))
    throw std::invalid_argument("eps_list must be ascending");
  Eigen::MatrixXd inv(grid.n1(), grid.n2());
  for (long i = 0; i < grid.n1(); ++i)
    for (long j = 0; j < grid.n2(); ++j) {
      const double w = weight(Point2{grid.axis1[i], grid.axis2[j]});
      if (!(w > 0.0) || !std::isfinite(w))
        throw std::invalid_argument("normalizer must be positive and finite on the grid");
      inv(i, j) = 1.0 / w;
    }

  const FbsSampler sampler(h, grid);
  const int workers = static_cast<int>(std::max(1L, std::min<long>(cfg.workers, cfg.n_paths)));
  std::vector<std::vector<long>> tallies(static_cast<std::size_t>(workers),
                                         std::vector<long>(eps_list.size(), 0));
  for_each_path(sampler, cfg, [&](int w, long, const Eigen::MatrixXd& x) {
    const double m = (x.array().abs() * inv.array()).maxCoeff();
    auto& t = tallies[static_cast<std::size_t>(w)];
    // eps ascending: every eps below m is exceeded
    const auto k = std::lower_bound(eps_list.begin(), eps_list.end(), m) - eps_list.begin();
    for (long e = 0; e < k; ++e) ++t[e];
  });

  std::vector<TailEstimate> out;
  out.reserve(eps_list.size());
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    long hits = 0;
    for (const auto& t : tallies) hits += t[e];
    out.push_back(make_tail_estimate(eps_list[e], hits, cfg.n_paths));
  }
  return out;
}

}  // namespace sheet_extremes
