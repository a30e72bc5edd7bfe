#pragma once

// Covariance structure of the normalized fractional Brownian sheet on R^2_+
// and the exact increment identities that follow from self-similarity and
// stationary rectangular increments. Normalization E X^2(1,1) = 1 throughout.

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace sheet_extremes {

/// |x|^e with a hard zero at x = 0 (avoids 0^0-like NaN paths through log).
template <typename Scalar>
Scalar abs_pow(Scalar x, Scalar e) {
  using std::abs;
  using std::exp;
  using std::log;
  const Scalar a = abs(x);
  if (a == Scalar(0)) return Scalar(0);
  return exp(e * log(a));
}

/// Self-similarity index (H1, H2) of the sheet, each strictly inside (0, 1).
template <typename Scalar>
class BasicHurstPair {
 public:
  BasicHurstPair(Scalar h1, Scalar h2) : h1_(h1), h2_(h2) {
    if (!(h1 > Scalar(0) && h1 < Scalar(1) && h2 > Scalar(0) && h2 < Scalar(1))) {
      throw std::invalid_argument("Hurst indices must lie in (0,1), got (" +
                                  std::to_string(static_cast<double>(h1)) + "," +
                                  std::to_string(static_cast<double>(h2)) + ")");
    }
  }

  Scalar h1() const { return h1_; }
  Scalar h2() const { return h2_; }
  Scalar h_min() const { return h1_ < h2_ ? h1_ : h2_; }
  Scalar h_max() const { return h1_ < h2_ ? h2_ : h1_; }
  Scalar h_sum() const { return h1_ + h2_; }
  Scalar q() const { return Scalar(1) / h1_ + Scalar(1) / h2_; }

  // Constants of the Hölder-metric covering bound.
  Scalar k1() const { return std::pow(h2_ / (h1_ + h2_), Scalar(1) / h1_); }
  Scalar k2() const { return std::pow(h1_ / (h1_ + h2_), Scalar(1) / h2_); }
  Scalar n1() const { return std::pow((h1_ + h2_) / h2_, Scalar(1) / h1_) + Scalar(3); }
  Scalar n2() const { return std::pow((h1_ + h2_) / h1_, Scalar(1) / h2_) + Scalar(3); }

  BasicHurstPair swapped() const { return BasicHurstPair(h2_, h1_); }

  template <typename Other>
  BasicHurstPair<Other> cast() const {
    return BasicHurstPair<Other>(static_cast<Other>(h1_), static_cast<Other>(h2_));
  }

 private:
  Scalar h1_;
  Scalar h2_;
};

template <typename Scalar>
struct BasicPoint2 {
  Scalar t1{0};
  Scalar t2{0};
};

/// Axis-aligned rectangle [t1_min, t1_max] x [t2_min, t2_max].
struct Rect {
  double t1_min = 0.0;
  double t1_max = 1.0;
  double t2_min = 0.0;
  double t2_max = 1.0;

  static Rect make(double t1_min, double t1_max, double t2_min, double t2_max) {
    Rect r{t1_min, t1_max, t2_min, t2_max};
    if (!(t1_min >= 0.0 && t2_min >= 0.0 && t1_min < t1_max && t2_min < t2_max) ||
        !std::isfinite(t1_max) || !std::isfinite(t2_max)) {
      throw std::invalid_argument("invalid rectangle bounds");
    }
    return r;
  }
  /// [0,T1] x [0,T2]
  static Rect origin(double t1_max, double t2_max) { return make(0.0, t1_max, 0.0, t2_max); }
  static Rect unit() { return origin(1.0, 1.0); }
  static Rect square12() { return make(1.0, 2.0, 1.0, 2.0); }

  double width1() const { return t1_max - t1_min; }
  double width2() const { return t2_max - t2_min; }
  bool anchored_at_origin() const { return t1_min == 0.0 && t2_min == 0.0; }
  bool is_square() const { return width1() == width2(); }
};

using HurstPair = BasicHurstPair<double>;
using Point2 = BasicPoint2<double>;

/// One-dimensional fBm kernel R(t,s) = (|t|^{2H} + |s|^{2H} - |t-s|^{2H}) / 2.
template <typename Scalar>
Scalar axis_kernel(Scalar hurst, Scalar t, Scalar s) {
  const Scalar e = Scalar(2) * hurst;
  return (abs_pow(t, e) + abs_pow(s, e) - abs_pow(t - s, e)) / Scalar(2);
}

/// E[X(t) X(s)] for the normalized sheet; the product of the two axis kernels.
template <typename Scalar>
Scalar fbs_covariance(const BasicHurstPair<Scalar>& h, const BasicPoint2<Scalar>& t,
                      const BasicPoint2<Scalar>& s) {
  return axis_kernel(h.h1(), t.t1, s.t1) * axis_kernel(h.h2(), t.t2, s.t2);
}

/// E[X(t) - X(s)]^2 expanded from the covariance.
template <typename Scalar>
Scalar increment_variance_from_covariance(const BasicHurstPair<Scalar>& h,
                                          const BasicPoint2<Scalar>& t,
                                          const BasicPoint2<Scalar>& s) {
  return fbs_covariance(h, t, t) - Scalar(2) * fbs_covariance(h, t, s) + fbs_covariance(h, s, s);
}

/// Variance of X(t) - X(s1, t2): |t1 - s1|^{2H1} t2^{2H2}.
template <typename Scalar>
Scalar increment_variance_h(const BasicHurstPair<Scalar>& h, const BasicPoint2<Scalar>& t,
                            Scalar s1) {
  if (s1 < Scalar(0)) throw std::invalid_argument("increment_variance_h: s1 must be >= 0");
  return abs_pow(t.t1 - s1, Scalar(2) * h.h1()) * abs_pow(t.t2, Scalar(2) * h.h2());
}

/// Variance of X(s1, t2) - X(s): |t2 - s2|^{2H2} s1^{2H1}.
///
/// The exponent on s1 is 2*H1. Printing it as 2*H2 contradicts both the
/// covariance expansion and the Minkowski bound below (see verify).
template <typename Scalar>
Scalar increment_variance_v(const BasicHurstPair<Scalar>& h, const BasicPoint2<Scalar>& s,
                            Scalar t2) {
  if (t2 < Scalar(0)) throw std::invalid_argument("increment_variance_v: t2 must be >= 0");
  return abs_pow(t2 - s.t2, Scalar(2) * h.h2()) * abs_pow(s.t1, Scalar(2) * h.h1());
}

/// Minkowski upper bound on the standard deviation of X(t) - X(s).
template <typename Scalar>
Scalar increment_std_bound(const BasicHurstPair<Scalar>& h, const BasicPoint2<Scalar>& t,
                           const BasicPoint2<Scalar>& s) {
  return abs_pow(t.t1 - s.t1, h.h1()) * abs_pow(t.t2, h.h2()) +
         abs_pow(t.t2 - s.t2, h.h2()) * abs_pow(s.t1, h.h1());
}

/// E[(Delta_u X(u + side))^2] by the 16-term covariance expansion.
template <typename Scalar>
Scalar rect_increment_variance_expanded(const BasicHurstPair<Scalar>& h,
                                        const BasicPoint2<Scalar>& u,
                                        const BasicPoint2<Scalar>& side) {
  const BasicPoint2<Scalar> corners[4] = {{u.t1 + side.t1, u.t2 + side.t2},
                                          {u.t1, u.t2 + side.t2},
                                          {u.t1 + side.t1, u.t2},
                                          {u.t1, u.t2}};
  const Scalar sign[4] = {Scalar(1), Scalar(-1), Scalar(-1), Scalar(1)};
  Scalar acc(0);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) acc += sign[a] * sign[b] * fbs_covariance(h, corners[a], corners[b]);
  return acc;
}

/// Closed form side1^{2H1} side2^{2H2} of the rectangular-increment variance.
template <typename Scalar>
Scalar rect_increment_variance(const BasicHurstPair<Scalar>& h, const BasicPoint2<Scalar>& side) {
  return abs_pow(side.t1, Scalar(2) * h.h1()) * abs_pow(side.t2, Scalar(2) * h.h2());
}

struct GridIndex {
  std::ptrdiff_t i = 0;
  std::ptrdiff_t j = 0;
};

/// Rectangular increment X(v1,v2) - X(u1,v2) - X(v1,u2) + X(u1,u2) read off a
/// sample stored as values(i, j) = X(axis1[i], axis2[j]).
template <typename Derived>
typename Derived::Scalar rect_increment(const Eigen::MatrixBase<Derived>& values, GridIndex u,
                                        GridIndex v) {
  auto in_range = [&](GridIndex p) {
    return p.i >= 0 && p.j >= 0 && p.i < values.rows() && p.j < values.cols();
  };
  if (!in_range(u) || !in_range(v)) throw std::out_of_range("rect_increment: index out of range");
  if (!(u.i < v.i && u.j < v.j))
    throw std::invalid_argument("rect_increment: u must lie strictly below v");
  return values(v.i, v.j) - values(u.i, v.j) - values(v.i, u.j) + values(u.i, u.j);
}

}  // namespace sheet_extremes
