#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>

namespace fibren {

// Extended-precision scalar. 80 significant digits covers the deep
// renormalization levels where binary64 runs out of mantissa; the stack
// allocator keeps the type trivially relocatable, which Eigen relies on.
using Big = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<80, boost::multiprecision::allocate_stack>,
    boost::multiprecision::et_off>;

template <class R>
constexpr int digits10_of = std::numeric_limits<R>::digits10;

template <class R>
inline R machine_eps() {
  return std::numeric_limits<R>::epsilon();
}

template <class R>
inline R pi() {
  return boost::math::constants::pi<R>();
}

template <class R>
inline R parse_real(const std::string& s) {
  if constexpr (std::is_same_v<R, double>) {
    return std::stod(s);
  } else {
    return R(s);
  }
}

/// Fixed-width decimal rendering; used everywhere numbers are persisted so
/// that identical runs produce identical bytes.
template <class R>
inline std::string to_decimal_string(const R& x, int digits = digits10_of<R>) {
  std::ostringstream os;
  os.precision(digits);
  os << std::scientific << x;
  return os.str();
}

template <class R>
inline R abs_of(const R& x) {
  using std::abs;
  return abs(x);
}

template <class R>
inline int sign_of(const R& x) {
  return x > 0 ? 1 : (x < 0 ? -1 : 0);
}

/// Real odd-index root, sign preserving: odd_root(-8, 3) = -2.
template <class R>
inline R odd_root(const R& y, int ell) {
  using std::pow;
  using std::abs;
  if (y == 0) return R(0);
  R r = pow(abs(y), R(1) / ell);
  return y < 0 ? -r : r;
}

/// Integer power with an int exponent (exact repeated squaring).
template <class R>
inline R int_pow(R base, long long e) {
  bool inv = e < 0;
  unsigned long long n = inv ? -(unsigned long long)e : (unsigned long long)e;
  R acc(1);
  while (n) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  return inv ? R(1) / acc : acc;
}

}  // namespace fibren
