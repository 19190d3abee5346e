#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "fibren/rotation.hpp"

namespace fibren {

template <class R>
struct TuneResult {
  R omega = R(0);
  R bracket_lo = R(0), bracket_hi = R(0);
  long long comparator_depth = 0;   // deepest orbit length used to orient
  long long verified_depth = 0;     // order check passed through this many points
  bool mirrored = false;            // orbit order matches the reversed rotation
  bool ok = false;
  std::string message;
};

struct TuneOptions {
  double omega_tol = 2e-15;
  long long orbit_budget_cap = 30'000'000;  // per comparator call
  int max_bisections = 90;
  int retries = 3;
};

namespace detail {

/// Iteration budget needed to orient a bisection whose bracket has the given
/// width: order combinatorics at depth q resolves parameter windows ~ q^-2.
inline long long budget_for_width(double width, long long cap) {
  if (width <= 0) return cap;
  double b = 32.0 / std::sqrt(width);
  if (b > static_cast<double>(cap)) return cap;
  return std::max<long long>(2048, static_cast<long long>(b));
}

}  // namespace detail

/// Finds omega* with golden-mean rotation number for a monotone degree-1
/// family. A coarse phase bisects on the rotation-number estimate, which is
/// globally valid; once the bracket is local the Fibonacci-time side oracle
/// takes over (it is perturbative but resolves far deeper).
template <class R, class Factory>
TuneResult<R> tune_rotation_golden(const Factory& family, const TuneOptions& opt = {}) {
  using std::abs;
  TuneResult<R> res;
  R g = golden_mean<R>();
  R lo(0), hi(1);
  int iter = 0;
  while (iter++ < opt.max_bisections && static_cast<double>(hi - lo) > 1e-5) {
    R mid = (lo + hi) / 2;
    auto est = rotation_number<R>(family(mid), 20000, R(0));
    if (!est.rational && est.error >= abs(est.value - g)) break;
    if (est.value < g)
      lo = mid;
    else
      hi = mid;
  }
  iter = 0;
  while (iter++ < opt.max_bisections && static_cast<double>(hi - lo) > opt.omega_tol) {
    R mid = (lo + hi) / 2;
    long long budget = detail::budget_for_width(static_cast<double>(hi - lo) * 0.25,
                                                opt.orbit_budget_cap);
    res.comparator_depth = std::max(res.comparator_depth, budget);
    auto f = family(mid);
    auto s = fibonacci_side_compare<R>(f, f.critical_value(), budget);
    if (s.side < 0)
      lo = mid;
    else if (s.side > 0)
      hi = mid;
    else
      break;  // clean golden alternation through the budget: resolved
  }
  res.omega = (lo + hi) / 2;
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  res.ok = true;
  return res;
}

/// Rational target p/q: bisection on the sign of lift^q(x0) - x0 - p at a
/// sample point; lands inside the mode-locking plateau.
template <class R, class Factory>
TuneResult<R> tune_rotation_rational(const Factory& family, long long p, long long q,
                                     const TuneOptions& opt = {}) {
  TuneResult<R> res;
  R lo(0), hi(1);
  auto displacement = [&](const R& w) {
    auto f = family(w);
    R y = R(1) / 7;
    R x0 = y;
    for (long long i = 0; i < q; ++i) y = f(y);
    return y - x0 - R(p);
  };
  int iter = 0;
  while (iter++ < opt.max_bisections && static_cast<double>(hi - lo) > opt.omega_tol) {
    R mid = (lo + hi) / 2;
    if (displacement(mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  res.omega = (lo + hi) / 2;
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  res.ok = true;
  return res;
}

/// Generic irrational target: bisection on the sign of the rotation-number
/// estimate. Budget grows as the bracket shrinks; stops when the estimator
/// cannot separate the candidate from the target.
template <class R, class Factory>
TuneResult<R> tune_rotation_value(const Factory& family, const R& target,
                                  const TuneOptions& opt = {}) {
  using std::abs;
  TuneResult<R> res;
  R lo(0), hi(1);
  int iter = 0;
  while (iter++ < opt.max_bisections && static_cast<double>(hi - lo) > opt.omega_tol) {
    R mid = (lo + hi) / 2;
    long long budget = detail::budget_for_width(static_cast<double>(hi - lo) * 0.25,
                                                opt.orbit_budget_cap);
    res.comparator_depth = std::max(res.comparator_depth, budget);
    auto est = rotation_number<R>(family(mid), budget, R(0));
    if (!est.rational && est.error >= abs(est.value - target)) break;  // cannot separate
    if (est.value < target)
      lo = mid;
    else
      hi = mid;
  }
  res.omega = (lo + hi) / 2;
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  res.ok = true;
  return res;
}

/// Fibonacci tuning for degree-2 covers.
///
/// The golden parameter is the intersection of the nested windows W_n of
/// parameters whose critical-value orbit keeps the golden signature through
/// the Fibonacci time q_n: signs at the times q_k alternate, magnitudes
/// shrink on each side, and the circular order of the orbit matches a
/// rotation orbit (either orientation). The search carves W_{n+1} out of W_n
/// level by level. Near-miss "ghost" windows -- parameters where some deep
/// return lands on the base exactly -- pass one or two extra levels before
/// dying, so the carve explores a few candidate subwindows depth-first with
/// lookahead instead of trusting the first one.
template <class R, class Factory>
TuneResult<R> tune_fibonacci_cover(const Factory& family, int depth,
                                   const TuneOptions& opt = {},
                                   int extra_levels = 8) {
  TuneResult<R> res;
  int target_level = depth + extra_levels;
  // parameter windows shrink faster than a decade per level and orbit
  // roundoff is amplified at the same rate, so the scalar's digit count caps
  // the reachable level
  int resolvable = (3 * static_cast<int>(digits10_of<R>)) / 5;
  if (target_level > resolvable) target_level = resolvable;

  bool mirrored_order = false;
  auto clean_until = [&](const R& w, int level) -> int {
    auto f = family(w);
    long long budget = fibonacci_ll(level) + 1;
    auto s = fibonacci_side_compare<R>(f, f.critical_value(), budget);
    int d = s.anomaly_level < 0 ? level : s.clean_levels;
    if (d >= level) {
      // false order branches die within a few dozen points, so a capped
      // check keeps the carve fast; the full-depth check runs once at the end
      long long n_pts = std::min<long long>(budget, 120);
      auto orbit = forward_orbit<R>(f, f.critical_value(), n_pts);
      auto to_level = [&](const OrderCheckResult& chk) {
        if (chk.ok) return level;
        int lv = 0;
        while (lv < level && fibonacci_ll(lv + 1) <= chk.first_bad_index) ++lv;
        return lv;
      };
      int d_plain = to_level(order_conjugacy_check(orbit, static_cast<std::size_t>(n_pts) + 1, false));
      int d_mirror = to_level(order_conjugacy_check(orbit, static_cast<std::size_t>(n_pts) + 1, true));
      int d_order = std::max(d_plain, d_mirror);
      if (d_order >= level) mirrored_order = d_mirror > d_plain;
      if (d_order < d) d = d_order;
    }
    return d;
  };

  struct Candidate { R pt; int depth; };

  // Zoom toward the deepest point near the given seed cell, digging all the
  // way to the lookahead depth so short-lived ghost windows rank below the
  // branch that actually continues.
  auto zoom_to_pass = [&](R a, R b, int /*level*/, int probe) {
    Candidate c{(a + b) / 2, -1};
    int stale = 0;
    for (int zoom = 0; zoom < 36 && stale < 3; ++zoom) {
      int bd = -1;
      R bw = a;
      for (int i = 0; i <= 48; ++i) {
        R w = a + (b - a) * i / 48;
        int dd = clean_until(w, probe);
        if (dd > bd) { bd = dd; bw = w; }
      }
      if (bd > c.depth) { c.depth = bd; c.pt = bw; stale = 0; } else { ++stale; }
      if (bd >= probe) return c;
      R cell = (b - a) / 48;
      a = bw - 3 * cell;
      b = bw + 3 * cell;
      if (cell <= machine_eps<R>() * 16) break;
    }
    return c;
  };

  // Candidate passing points for `level` inside [lo,hi], deepest first.
  auto candidates = [&](const R& lo, const R& hi, int level) {
    const int n = 64;
    int probe = std::min(level + 2, target_level);
    std::vector<int> d(n + 1);
    for (int i = 0; i <= n; ++i) d[i] = clean_until(lo + (hi - lo) * i / n, probe);
    std::vector<std::pair<int, int>> seeds;  // (depth, index), local maxima
    for (int i = 0; i <= n; ++i) {
      if ((i == 0 || d[i] >= d[i - 1]) && (i == n || d[i] >= d[i + 1]) && d[i] >= level - 1)
        seeds.push_back({d[i], i});
    }
    std::sort(seeds.begin(), seeds.end(), [](auto& a, auto& b) { return a.first > b.first; });
    R cell = (hi - lo) / n;
    std::vector<Candidate> out;
    std::vector<int> used;
    for (auto& s : seeds) {
      bool dup = false;
      for (int u : used) dup = dup || std::abs(u - s.second) <= 2;
      if (dup) continue;
      used.push_back(s.second);
      R c0 = lo + cell * s.second;
      auto c = zoom_to_pass(c0 - 2 * cell, c0 + 2 * cell, level, probe);
      for (auto& o : out) dup = dup || abs_of(o.pt - c.pt) < (hi - lo) / 500;
      if (c.depth >= level && !dup) out.push_back(c);
      if (out.size() >= 3) break;
    }
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.depth > b.depth; });
    return out;
  };

  // Carve the edges of the pass region of `level` inside [lo,hi] around a
  // passing point.
  auto carve = [&](R& lo, R& hi, const R& pass_pt, int level) {
    R a = lo, b = pass_pt;
    for (int it = 0; it < 48; ++it) {
      R m = (a + b) / 2;
      if (clean_until(m, level) >= level) b = m; else a = m;
      if (b - a < (hi - lo) / 2048) break;
    }
    R new_lo = a;
    a = pass_pt;
    b = hi;
    for (int it = 0; it < 48; ++it) {
      R m = (a + b) / 2;
      if (clean_until(m, level) >= level) a = m; else b = m;
      if (b - a < (hi - lo) / 2048) break;
    }
    lo = new_lo;
    hi = b;
  };

  // Depth-first refinement with bounded backtracking.
  long long nodes_budget = 400;
  std::function<bool(R, R, int, R&, R&)> dfs = [&](R lo, R hi, int level, R& out_lo,
                                                   R& out_hi) -> bool {
    if (level >= target_level) {
      out_lo = lo;
      out_hi = hi;
      return true;
    }
    if (--nodes_budget < 0) return false;
    int next = level + 1;
    res.comparator_depth = std::max(res.comparator_depth, fibonacci_ll(next) + 1);
    auto cands = candidates(lo, hi, next);
#ifdef FIBREN_TUNE_TRACE
    std::fprintf(stderr, "[dfs] level %d window [%.17g, %.17g] cands=%zu\n", next, (double)lo,
                 (double)hi, cands.size());
    for (auto& c : cands)
      std::fprintf(stderr, "     cand pt=%.17g depth=%d\n", (double)c.pt, c.depth);
#endif
    for (auto& c : cands) {
      R wlo = lo, whi = hi;
      carve(wlo, whi, c.pt, next);
      if (dfs(wlo, whi, next, out_lo, out_hi)) return true;
    }
    return false;
  };

  // Initial window from a coarse scan.
  const int grid = 2048;
  const int level0 = 4;
  int best_i = -1, best_depth = -1;
  std::vector<char> pass(grid + 1, 0);
  for (int i = 0; i <= grid; ++i) {
    int d = clean_until(R(i) / grid, 8);
    pass[i] = d >= level0;
    if (d > best_depth) { best_depth = d; best_i = i; }
  }
  if (best_i < 0 || !pass[best_i]) {
    res.ok = false;
    res.message = "no window: no grid parameter is golden through the seed level";
    return res;
  }
  int il = best_i, ih = best_i;
  while (il > 0 && pass[il - 1]) --il;
  while (ih < grid && pass[ih + 1]) ++ih;
  R lo = R(il > 0 ? il - 1 : 0) / grid;
  R hi = R(ih < grid ? ih + 1 : grid) / grid;

  R out_lo, out_hi;
  if (!dfs(lo, hi, level0, out_lo, out_hi)) {
    res.ok = false;
    res.message = "window refinement failed: search exhausted";
    return res;
  }
  R w_star = (out_lo + out_hi) / 2;
  if (clean_until(w_star, target_level) < target_level) {
    // center may straddle; fall back to a passing point inside
    for (int i = 0; i <= 32; ++i) {
      R w = out_lo + (out_hi - out_lo) * i / 32;
      if (clean_until(w, target_level) >= target_level) { w_star = w; break; }
    }
  }
  auto f = family(w_star);
  long long q_verify = std::min<long long>(fibonacci_ll(depth), 4000);
  auto orbit = forward_orbit<R>(f, f.critical_value(), q_verify);
  auto chk = order_conjugacy_check(orbit, static_cast<std::size_t>(q_verify) + 1, mirrored_order);
  if (!chk.ok) {
    res.ok = false;
    res.message = "refined parameter failed the order check at the requested depth";
    return res;
  }
  res.omega = w_star;
  res.bracket_lo = out_lo;
  res.bracket_hi = out_hi;
  res.verified_depth = q_verify;
  res.mirrored = mirrored_order;
  res.ok = true;
  return res;
}

}  // namespace fibren
