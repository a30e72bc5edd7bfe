#pragma once

// Exact sampling of the fractional Brownian sheet on tensor grids and Monte
// Carlo estimation of normalized sup-tail probabilities.

#include "sheet_extremes/field_model.hpp"
#include "sheet_extremes/tail_stats.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace sheet_extremes {

inline constexpr long kDefaultMaxGridPoints = 1L << 22;

struct Grid2 {
  std::vector<double> axis1;
  std::vector<double> axis2;

  /// Validates strict monotonicity, non-negativity and the point budget.
  static Grid2 make(std::vector<double> axis1, std::vector<double> axis2,
                    long max_points = kDefaultMaxGridPoints);
  /// n points per axis; on an axis starting at 0 the points are T i/n, i = 1..n,
  /// otherwise the endpoints are included.
  static Grid2 uniform(const Rect& rect, long n1, long n2);
  /// Geometrically spaced with both endpoints; needs a positive lower corner.
  static Grid2 log_spaced(const Rect& rect, long n1, long n2);

  long n1() const { return static_cast<long>(axis1.size()); }
  long n2() const { return static_cast<long>(axis2.size()); }
};

struct AxisFactor {
  Eigen::MatrixXd lower;  // over the strictly positive points of the axis
  long zeros = 0;         // leading zero coordinates, sampled as exact 0
  double jitter = 0.0;    // absolute diagonal shift that was needed, 0 if none
};

/// Lower-triangular factor of the 1-D kernel matrix on a strictly positive,
/// strictly increasing axis. Retries with diagonal jitter 1e-14 .. 1e-10 times
/// trace/n; throws std::runtime_error if all attempts fail.
AxisFactor axis_cov_factor(double hurst, const std::vector<double>& axis);

struct McConfig {
  long n_paths = 100000;
  std::uint64_t seed = 0;
  int workers = 1;
};

class FbsSampler {
 public:
  FbsSampler(const HurstPair& h, const Grid2& grid);

  const Grid2& grid() const { return grid_; }
  const AxisFactor& factor1() const { return f1_; }
  const AxisFactor& factor2() const { return f2_; }

  /// Path `path` of stream `seed`: L1 Z L2^T with Z filled row-major from the
  /// Philox stream (seed, path). Written into `out` (n1 x n2).
  void sample(std::uint64_t seed, std::uint64_t path, Eigen::MatrixXd& out) const;
  Eigen::MatrixXd sample(std::uint64_t seed, std::uint64_t path) const;

 private:
  HurstPair h_;
  Grid2 grid_;
  AxisFactor f1_;
  AxisFactor f2_;
};

using PointWeight = std::function<double(const Point2&)>;

/// For each path, max over the grid of |X(t)| / weight(t); counts exceedances of
/// each eps (eps_list ascending). Results do not depend on cfg.workers.
std::vector<TailEstimate> empirical_sup_tail(const HurstPair& h, const Grid2& grid,
                                             const PointWeight& weight,
                                             const std::vector<double>& eps_list,
                                             const McConfig& cfg);

/// Runs `visit(path, sample)` for paths [0, n_paths) split over workers; each
/// worker receives its own index slot in [0, workers).
void for_each_path(const FbsSampler& sampler, const McConfig& cfg,
                   const std::function<void(int worker, long path, const Eigen::MatrixXd&)>& visit);

}  // namespace sheet_extremes
