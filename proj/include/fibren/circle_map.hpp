#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fibren/real.hpp"

namespace fibren {

using BigInt = boost::multiprecision::cpp_int;

/// Golden mean gamma = (sqrt(5)-1)/2, the positive root of g^2 + g = 1.
template <class R>
inline R golden_mean() {
  using std::sqrt;
  return (sqrt(R(5)) - 1) / 2;
}

/// Fibonacci return times with the convention q_0 = 1, q_1 = 2.
inline BigInt fibonacci(int n) {
  if (n < 0) throw std::invalid_argument("fibonacci: n must be >= 0");
  BigInt a = 1, b = 2;  // q_0, q_1
  if (n == 0) return a;
  for (int i = 1; i < n; ++i) {
    BigInt c = a + b;
    a = b;
    b = c;
  }
  return b;
}

/// Same sequence for indices small enough to fit a machine word.
inline long long fibonacci_ll(int n) {
  BigInt q = fibonacci(n);
  if (q > BigInt(std::numeric_limits<long long>::max()))
    throw std::overflow_error("fibonacci_ll: index too large");
  return q.convert_to<long long>();
}

template <class R>
inline R wrap01(const R& x) {
  using std::floor;
  R y = x - floor(x);
  if (y >= 1) y -= 1;  // guard against rounding at the seam
  if (y < 0) y += 1;
  return y;
}

/// Signed circular gap a - b reduced to (-1/2, 1/2].
template <class R>
inline R signed_gap(const R& a, const R& b) {
  R d = wrap01(a - b);
  if (d > R(1) / 2) d -= 1;
  return d;
}

/// Lift of a circle endomorphism of degree 1 or 2 with a single critical
/// point of odd order `exponent` at x = 1/2.
///
/// F(x) = omega + degree * [ x + sum_k w_k sin(2 pi k (x - 1/2)) ],
/// the exact antiderivative of (degree / m) * sin^(exponent-1)(pi (x - 1/2)),
/// normalized so F(x + 1) = F(x) + degree holds bit-exactly: the oscillatory
/// part is evaluated at x reduced mod 1, so both sides see identical bits.
template <class R>
struct CircleMapLift {
  int degree = 1;
  int exponent = 3;
  R omega = R(0);
  R critical_point = R(1) / 2;
  int precision = digits10_of<R>;
  std::vector<R> trig;  // w_1 .. w_m, m = (exponent-1)/2

  R operator()(const R& x) const {
    using std::floor;
    using std::sin;
    using std::cos;
    R k = floor(x);
    R xr = x - k;
    R theta = 2 * pi<R>() * (xr - R(1) / 2);
    // sin(j*theta) by angle recurrence: one sin/cos pair per evaluation.
    R s1 = sin(theta), c1 = cos(theta);
    R sj = s1, cj = c1;
    R osc = trig[0] * s1;
    for (std::size_t j = 1; j < trig.size(); ++j) {
      R s_next = sj * c1 + cj * s1;
      R c_next = cj * c1 - sj * s1;
      sj = s_next;
      cj = c_next;
      osc += trig[j] * sj;
    }
    return omega + degree * (k + xr + osc);
  }

  /// dF/dx = (degree / m) * sin^(exponent-1)(pi (x - 1/2)); evaluated in
  /// closed form so nonnegativity is structural, not a cancellation accident.
  R derivative(const R& x) const {
    using std::sin;
    R s = sin(pi<R>() * (wrap01(x) - R(1) / 2));
    return degree * norm_factor_inv() * int_pow(s, exponent - 1);
  }

  R critical_value() const { return wrap01((*this)(critical_point)); }

  /// 1/m with m = int_0^1 sin^(exponent-1)(pi(t-1/2)) dt = C(2m,m)/4^m.
  R norm_factor_inv() const {
    int m = (exponent - 1) / 2;
    R num = int_pow(R(4), m);
    R den = R(binomial_ll(2 * m, m));
    return num / den;
  }

  static long long binomial_ll(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  }
};

namespace detail {

template <class R>
std::vector<R> trig_weights(int ell) {
  if (ell < 3 || ell % 2 == 0)
    throw std::invalid_argument("critical exponent must be an odd integer >= 3");
  int m = (ell - 1) / 2;
  R c_mm = R(CircleMapLift<R>::binomial_ll(2 * m, m));
  std::vector<R> w(m);
  for (int k = 1; k <= m; ++k) {
    R c = R(CircleMapLift<R>::binomial_ll(2 * m, m - k));
    R v = c / (c_mm * k * pi<R>());
    w[k - 1] = (k % 2 == 0) ? v : -v;
  }
  return w;
}

}  // namespace detail

/// Degree-1 family: lifts of critical circle homeomorphisms.
template <class R>
CircleMapLift<R> make_homeo_family(int ell, const R& omega,
                                   int precision = digits10_of<R>) {
  CircleMapLift<R> f;
  f.degree = 1;
  f.exponent = ell;
  f.omega = omega;
  f.precision = precision;
  f.trig = detail::trig_weights<R>(ell);
  return f;
}

/// Degree-2 family: critical circle covers.
template <class R>
CircleMapLift<R> make_cover_family(int ell, const R& omega,
                                   int precision = digits10_of<R>) {
  CircleMapLift<R> f = make_homeo_family<R>(ell, omega, precision);
  f.degree = 2;
  return f;
}

/// Rigid rotation as a degenerate "lift" (no critical point); the marked
/// point plays the role of the critical value in oracle runs.
template <class R>
struct RigidRotation {
  R rho;
  R operator()(const R& x) const { return x + rho; }
};

}  // namespace fibren
