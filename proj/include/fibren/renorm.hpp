#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fibren/circle_map.hpp"

namespace fibren {

/// Bracketed root finding (Illinois variant of regula falsi, bisection
/// fallback). fa, fb must have opposite signs.
template <class R, class Fn>
R bracketed_root(const Fn& fn, R a, R b, R fa, R fb, const R& xtol, int max_iter = 200) {
  using std::abs;
  if (sign_of(fa) == 0) return a;
  if (sign_of(fb) == 0) return b;
  if (sign_of(fa) == sign_of(fb))
    throw std::runtime_error("bracketed_root: endpoints do not straddle a root");
  int side = 0;
  R m = a;
  for (int it = 0; it < max_iter; ++it) {
    if (abs(b - a) <= xtol) break;
    m = (a * fb - b * fa) / (fb - fa);
    if (!(m > a && m < b) && !(m > b && m < a)) m = (a + b) / 2;
    R fm = fn(m);
    if (sign_of(fm) == 0) return m;
    if (sign_of(fm) == sign_of(fa)) {
      a = m;
      fa = fm;
      if (side == -1) fb /= 2;
      side = -1;
    } else {
      b = m;
      fb = fm;
      if (side == +1) fa /= 2;
      side = +1;
    }
  }
  return (a + b) / 2;
}

struct CombinatoricsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One renormalization level: the interval I_n between the order-q_n and
/// order-q_{n-1} preimages of the critical value, in the coordinate centered
/// at the critical value, together with the first-return branch data.
template <class R>
struct RenormLevel {
  int level = 0;
  R a = R(0), b = R(0);      // I_n endpoints: u(x_{q_n}), u(x_{q_{n-1}})
  R split = R(0);            // u(x_{q_{n+1}}), separates the two branches
  long long t_central = 0;   // q_n, return time on the branch containing 0
  long long t_off = 0;       // q_{n-1}
  R d = R(0);                // u(psi^{q_n}(0)); zeta_n(x) = x / d
  int orientation = +1;      // sign of d
  R zeta_scale() const { return 1 / d; }
  R length() const { using std::abs; return abs(a) + abs(b); }
};

/// tau estimates per level with Aitken extrapolation.
template <class R>
struct ScalingSeries {
  std::vector<R> values;  // values[k] ~ tau from levels (k, k+1)
  R extrapolated = R(0);
  R error_estimate = R(0);
  bool monotone_tail = true;
};

/// Preimage ladder and first-return data of a tuned map around its critical
/// value. Preimages are found by backward iteration along the critical
/// orbit: x_{q_{n+1}} solves psi^{q_n}(x) = x_{q_{n-1}} next to the critical
/// value, which telescopes to psi^{q_{n+1}}(x_{q_{n+1}}) = critical value.
template <class R, class Map>
class RenormLadder {
 public:
  RenormLadder(const Map& f, const R& critical_point, int n_max)
      : f_(f), n_max_(n_max) {
    using std::abs;
    c_pos_ = wrap01(critical_point);
    v_pos_ = wrap01(f(critical_point));
    // forward orbit of the critical value at all times through q_{n_max+1}
    long long horizon = fibonacci_ll(n_max + 1);
    u_fwd_.resize(horizon + 1);
    u_fwd_[0] = R(0);
    {
      R pos = v_pos_;
      for (long long t = 1; t <= horizon; ++t) {
        pos = step(pos);
        u_fwd_[t] = signed_gap(pos, v_pos_);
      }
    }
    // preimage ladder
    pre_.resize(n_max + 2);
    pre_[0] = c_pos_;  // order q_0 = 1: the critical point itself
    R u_c = signed_gap(c_pos_, v_pos_);
    pre_[1] = solve_preimage(1, c_pos_, -sign_of(u_c), abs(u_c));
    for (int n = 1; n <= n_max; ++n) {
      R u_prev = signed_gap(pre_[n - 1], v_pos_);
      R u_cur = signed_gap(pre_[n], v_pos_);
      pre_[n + 1] = solve_preimage(fibonacci_ll(n), pre_[n - 1], sign_of(u_prev), abs(u_cur));
      R u_next = signed_gap(pre_[n + 1], v_pos_);
      if (sign_of(u_next) == sign_of(u_cur))
        throw CombinatoricsError("preimage ladder: sides failed to alternate at level " +
                                 std::to_string(n + 1));
      if (abs(u_next) >= abs(u_cur))
        throw CombinatoricsError("preimage ladder: intervals failed to shrink at level " +
                                 std::to_string(n + 1));
    }
  }

  int depth() const { return n_max_; }
  const R& critical_value_pos() const { return v_pos_; }

  /// Signed coordinate (relative to the critical value) of x_{q_n}.
  R preimage_u(int n) const { return signed_gap(pre_.at(n), v_pos_); }
  /// Forward orbit signed coordinate at time t.
  R forward_u(long long t) const { return u_fwd_.at(t); }
  /// d_n = u at the Fibonacci time q_n.
  R d(int n) const { return u_fwd_.at(fibonacci_ll(n)); }

  RenormLevel<R> level(int n) const {
    if (n < 1 || n > n_max_) throw std::out_of_range("renorm level");
    RenormLevel<R> L;
    L.level = n;
    L.a = preimage_u(n);
    L.b = preimage_u(n - 1);
    L.split = preimage_u(n + 1);
    L.t_central = fibonacci_ll(n);
    L.t_off = fibonacci_ll(n - 1);
    L.d = d(n);
    L.orientation = sign_of(L.d);
    if (sign_of(L.a) == sign_of(L.b))
      throw CombinatoricsError("I_n endpoints on the same side");
    if (!inside(L.d, L.a, L.b))
      throw CombinatoricsError("psi^{q_n}(0) escaped I_n");
    return L;
  }

  /// First-return verification for the two principal branches. For small n
  /// the return times are checked exhaustively; deeper levels check that the
  /// branch iterates land back in I_n.
  void verify_first_return(int n, bool exhaustive = false) const {
    RenormLevel<R> L = level(n);
    auto check_branch = [&](const R& lo, const R& hi, long long t_ret) {
      for (R frac : {R(1) / 4, R(1) / 2, R(3) / 4}) {
        R z = lo + (hi - lo) * frac;
        R pos = wrap01(v_pos_ + z);
        if (exhaustive) {
          for (long long t = 1; t < t_ret; ++t) {
            pos = step(pos);
            R u = signed_gap(pos, v_pos_);
            if (inside(u, L.a, L.b) && !near_edge(u, L))
              throw CombinatoricsError("early return at level " + std::to_string(n));
          }
          pos = step(pos);
        } else {
          for (long long t = 0; t < t_ret; ++t) pos = step(pos);
        }
        R u = signed_gap(pos, v_pos_);
        if (!inside(u, L.a, L.b))
          throw CombinatoricsError("branch failed to return to I_n at level " +
                                   std::to_string(n));
      }
    };
    // central branch (contains 0): time q_n; off-central: time q_{n-1}
    check_branch(L.a, L.split, L.t_central);
    check_branch(L.split, L.b, L.t_off);
  }

  /// Renormalized branch pair at level n: both branches conjugated by
  /// zeta_n(x) = x/d_n, so the image of 0 is exactly 1.
  struct Rescaled {
    std::function<R(R)> central, off;
    R dom_central_lo, dom_central_hi;  // contains 0
    R dom_off_lo, dom_off_hi;
    long long t_central, t_off;
    int level;
  };

  Rescaled renormalize(int n) const {
    RenormLevel<R> L = level(n);
    Rescaled out;
    out.level = n;
    out.t_central = L.t_central;
    out.t_off = L.t_off;
    R d_n = L.d;
    auto mk = [this, d_n](long long t_ret) {
      return [this, d_n, t_ret](R t) {
        R pos = wrap01(v_pos_ + t * d_n);
        for (long long k = 0; k < t_ret; ++k) pos = step(pos);
        return signed_gap(pos, v_pos_) / d_n;
      };
    };
    out.central = mk(L.t_central);
    out.off = mk(L.t_off);
    out.dom_central_lo = order2(L.a / d_n, L.split / d_n).first;
    out.dom_central_hi = order2(L.a / d_n, L.split / d_n).second;
    out.dom_off_lo = order2(L.split / d_n, L.b / d_n).first;
    out.dom_off_hi = order2(L.split / d_n, L.b / d_n).second;
    return out;
  }

  /// tau estimates from consecutive zeta scales, sign from the orientation
  /// flip; Aitken-extrapolated.
  ScalingSeries<R> scaling_sequence(int n_lo = 1) const {
    using std::abs;
    ScalingSeries<R> s;
    for (int n = n_lo; n < n_max_; ++n) {
      R dn = d(n), dn1 = d(n + 1);
      if (sign_of(dn) == sign_of(dn1)) {
        s.monotone_tail = false;
        break;
      }
      s.values.push_back(-abs(dn / dn1));
    }
    aitken_tail(s);
    return s;
  }

  /// Same ratios for the preimage intervals |I_n| / |I_{n+1}|.
  ScalingSeries<R> interval_ratio_sequence() const {
    using std::abs;
    ScalingSeries<R> s;
    for (int n = 1; n < n_max_; ++n) {
      R r = level(n).length() / level(n + 1).length();
      s.values.push_back(r);
    }
    aitken_tail(s);
    return s;
  }

 private:
  static std::pair<R, R> order2(const R& x, const R& y) {
    return x <= y ? std::make_pair(x, y) : std::make_pair(y, x);
  }
  static bool inside(const R& u, const R& a, const R& b) {
    return (u > a && u < b) || (u > b && u < a);
  }
  static bool near_edge(const R& u, const RenormLevel<R>& L) {
    using std::abs;
    R tol = L.length() / 1024;
    return abs(u - L.a) < tol || abs(u - L.b) < tol;
  }

  R step(const R& pos) const {
    using std::floor;
    R y = f_(pos);
    R fl = floor(y);
    R p = y - fl;
    if (p >= 1) p -= 1;
    if (p < 0) p += 1;
    return p;
  }

  /// Finds the preimage of `target_pos` of order t_ret closest to the
  /// critical value on the side `dir`, by expanding search then bracketed
  /// root finding on the circular offset.
  R solve_preimage(long long t_ret, const R& target_pos, int dir, const R& scale) const {
    using std::abs;
    auto offset = [&](const R& z) {
      R pos = wrap01(v_pos_ + z);
      for (long long t = 0; t < t_ret; ++t) pos = step(pos);
      return signed_gap(pos, target_pos);
    };
    R h = scale / 16;
    R z_prev = R(0);
    R f_prev = offset(z_prev);
    for (int i = 0; i < 200; ++i) {
      R z = dir * h;
      R fz = offset(z);
      if (sign_of(fz) != sign_of(f_prev) && abs(fz) < R(1) / 4 && abs(f_prev) < R(1) / 4) {
        R xtol = machine_eps<R>() * (abs(z) + abs(z_prev) + scale) * 4;
        R lo = z_prev, hi = z;
        R root = bracketed_root(offset, lo, hi, f_prev, fz, xtol, 400);
        return wrap01(v_pos_ + root);
      }
      z_prev = z;
      f_prev = fz;
      h *= R(3) / 2;
      if (h > R(1) / 2)
        throw CombinatoricsError("preimage search left the fundamental domain");
    }
    throw CombinatoricsError("preimage search exhausted");
  }

  void aitken_tail(ScalingSeries<R>& s) const {
    using std::abs;
    auto& v = s.values;
    if (v.size() < 3) {
      if (!v.empty()) s.extrapolated = v.back();
      s.error_estimate = v.size() >= 2 ? abs(v[v.size() - 1] - v[v.size() - 2]) : R(1);
      return;
    }
    std::size_t first = v.size() > 5 ? v.size() - 5 : 0;
    R best = v.back();
    R corr = abs(v[v.size() - 1] - v[v.size() - 2]);
    for (std::size_t i = first; i + 2 < v.size(); ++i) {
      R d1 = v[i + 1] - v[i];
      R d2 = v[i + 2] - v[i + 1];
      R den = d2 - d1;
      if (den != 0) {
        R acc = v[i + 2] - d2 * d2 / den;
        corr = abs(acc - best);
        best = acc;
      }
    }
    s.extrapolated = best;
    R spread = abs(v.back() - best);
    s.error_estimate = corr > spread ? corr : spread;
  }

  Map f_;
  int n_max_;
  R c_pos_, v_pos_;
  std::vector<R> u_fwd_;
  std::vector<R> pre_;  // circle positions of x_{q_n}
};

/// Necessary upper-bound inequality for a scaling constant at a given
/// critical exponent: |tau| <= ell |tau|^(2/ell) log(|tau|^(4/ell)).
template <class R>
bool check_tau_bound(const R& tau, int ell) {
  using std::abs;
  using std::log;
  using std::pow;
  R t = abs(tau);
  R rhs = ell * pow(t, R(2) / ell) * log(pow(t, R(4) / ell));
  return t <= rhs;
}

}  // namespace fibren
