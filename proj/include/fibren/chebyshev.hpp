#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "fibren/real.hpp"

namespace fibren {

/// Chebyshev series sum c_k T_k(s(x)) on an interval [lo, hi].
template <class R>
struct Cheb {
  using Vec = Eigen::Matrix<R, Eigen::Dynamic, 1>;
  R lo = R(-1), hi = R(1);
  Vec c;

  int degree() const { return static_cast<int>(c.size()) - 1; }

  R to_unit(const R& x) const { return (2 * x - lo - hi) / (hi - lo); }

  R operator()(const R& x) const {
    // Clenshaw recurrence
    R s = to_unit(x);
    R b1(0), b2(0);
    for (int k = degree(); k >= 1; --k) {
      R b0 = 2 * s * b1 - b2 + c[k];
      b2 = b1;
      b1 = b0;
    }
    return s * b1 - b2 + c[0];
  }

  Cheb derivative() const {
    Cheb d;
    d.lo = lo;
    d.hi = hi;
    int n = degree();
    d.c = Vec::Zero(std::max(n, 1));
    R scale = 2 / (hi - lo);
    // standard descending recurrence for Chebyshev derivative coefficients
    Vec w = Vec::Zero(n + 2);
    for (int k = n; k >= 1; --k) {
      w[k - 1] = w[k + 1] + 2 * k * c[k];
    }
    for (int k = 0; k < std::max(n, 1); ++k) d.c[k] = w[k] * scale;
    d.c[0] /= 2;
    return d;
  }

  /// Least-squares fit of point data at the given degree.
  static Cheb fit(const R& lo, const R& hi, const std::vector<R>& xs,
                  const std::vector<R>& ys, int deg) {
    using Mat = Eigen::Matrix<R, Eigen::Dynamic, Eigen::Dynamic>;
    Cheb out;
    out.lo = lo;
    out.hi = hi;
    const int m = static_cast<int>(xs.size());
    Mat A(m, deg + 1);
    Vec b(m);
    for (int i = 0; i < m; ++i) {
      R s = out.to_unit(xs[i]);
      R t0 = R(1), t1 = s;
      A(i, 0) = t0;
      if (deg >= 1) A(i, 1) = t1;
      for (int k = 2; k <= deg; ++k) {
        R t2 = 2 * s * t1 - t0;
        A(i, k) = t2;
        t0 = t1;
        t1 = t2;
      }
      b(i) = ys[i];
    }
    out.c = Eigen::ColPivHouseholderQR<Mat>(A).solve(b);
    return out;
  }

  /// Interpolation of a callable at Chebyshev nodes of the interval.
  template <class Fn>
  static Cheb interpolate(const R& lo, const R& hi, int deg, const Fn& f) {
    std::vector<R> xs(deg + 1), ys(deg + 1);
    for (int i = 0; i <= deg; ++i) {
      R t = chebyshev_node<R>(i, deg + 1);
      xs[i] = lo + (hi - lo) * (t + 1) / 2;
      ys[i] = f(xs[i]);
    }
    return fit(lo, hi, xs, ys, deg);
  }

  /// Relative size of the trailing coefficients; a truncation health check.
  R tail_ratio(int tail = 3) const {
    using std::abs;
    R mx(0), tl(0);
    for (int k = 0; k <= degree(); ++k) {
      R a = abs(c[k]);
      if (a > mx) mx = a;
      if (k > degree() - tail && a > tl) tl = a;
    }
    return mx > 0 ? tl / mx : R(0);
  }
};

/// k-th Chebyshev node of an n-point rule on [-1, 1].
template <class R>
R chebyshev_node(int k, int n) {
  using std::cos;
  return cos(pi<R>() * (2 * k + 1) / (2 * n));
}

/// Chebyshev-distributed points on [lo, hi].
template <class R>
std::vector<R> chebyshev_points(const R& lo, const R& hi, int n) {
  std::vector<R> xs(n);
  for (int i = 0; i < n; ++i) {
    R t = chebyshev_node<R>(i, n);
    xs[i] = lo + (hi - lo) * (t + 1) / 2;
  }
  return xs;
}

}  // namespace fibren
