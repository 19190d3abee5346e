#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fibren/circle_map.hpp"

namespace fibren {

/// A finite piece of a forward orbit on the circle.
template <class R>
struct OrbitSegment {
  R base_point;
  std::vector<R> points;        // positions mod 1, points[k] = pos of map^k(base)
  std::vector<long long> times; // iteration indices, strictly increasing
};

template <class R, class Map>
OrbitSegment<R> forward_orbit(const Map& f, const R& base, long long length) {
  OrbitSegment<R> o;
  o.base_point = wrap01(base);
  o.points.reserve(length + 1);
  o.times.reserve(length + 1);
  R y = base;
  for (long long k = 0; k <= length; ++k) {
    o.points.push_back(wrap01(y));
    o.times.push_back(k);
    y = f(y);
  }
  return o;
}

/// One closest return: time t and the signed circular distance to the base.
template <class R>
struct ClosestReturn {
  long long time = 0;
  R dist = R(0);   // signed gap, alternates sides for irrational rotation
  long long winding = 0;  // integer part of the lift displacement
};

template <class R>
struct ReturnScan {
  std::vector<ClosestReturn<R>> records;
  long long scanned_until = 0;  // last iterate actually examined
  bool degenerate = false;      // a tie at working precision was hit
};

/// Record sequence of strict minima of |pos(f^t b) - b|. These are exactly
/// the continued-fraction denominators of the (combinatorial) rotation
/// number, which is what every routine downstream consumes. The orbit is
/// iterated in wrapped coordinates so roundoff does not grow with the lift.
template <class R, class Map>
ReturnScan<R> closest_return_scan(const Map& f, const R& base, long long max_time,
                                  std::size_t max_records = 64) {
  using std::abs;
  using std::floor;
  ReturnScan<R> out;
  R pos = wrap01(base);
  R base_pos = pos;
  long long winding = 0;
  R best = R(2);
  R tie = machine_eps<R>() * 100;
  long long last_t = 0;
  for (long long t = 1; t <= max_time; ++t) {
    R y = f(pos);
    R fl = floor(y);
    pos = y - fl;
    if (pos >= 1) { pos -= 1; fl += 1; }
    winding += static_cast<long long>(fl);
    out.scanned_until = t;
    R d = signed_gap(pos, base_pos);
    R ad = abs(d);
    // the lift displacement is (winding + pos - base) = p + d with p integer
    long long p = winding + static_cast<long long>(floor(pos - base_pos - d + R(1) / 2));
    if (ad <= tie) {
      // exact return at working precision: periodic orbit
      out.records.push_back({t, d, p});
      return out;
    }
    if (ad < best) {
      if (best - ad <= tie && t > 1) {
        out.degenerate = true;  // returns tied at working precision
      } else {
        out.records.push_back({t, d, p});
        best = ad;
        last_t = t;
        if (out.records.size() >= max_records) return out;
      }
    }
    if (last_t > 0 && t > 32 * last_t + 1024) break;  // locked orbit
  }
  return out;
}

template <class R, class Map>
std::vector<ClosestReturn<R>> closest_return_records(const Map& f, const R& base,
                                                     long long max_time,
                                                     std::size_t max_records = 64) {
  return closest_return_scan<R>(f, base, max_time, max_records).records;
}

/// Continued-fraction coefficients a_1, a_2, ... recovered from the record
/// times. q_{k} = a_k q_{k-1} + q_{k-2}; the division must be exact, and the
/// sides must alternate, otherwise the orbit is not order-isomorphic to a
/// rotation orbit and we flag it.
template <class R>
struct ReturnCombinatorics {
  std::vector<long long> cf;           // a_1, a_2, ...
  std::vector<long long> denominators; // q_1, q_2, ... (matching cf)
  std::vector<ClosestReturn<R>> records;
  bool periodic = false;               // an exact return was seen
  long long period_q = 0, period_p = 0;
  bool violation = false;              // non-rotation combinatorics
  std::string note;
  long long q_prev_final = 0, q_cur_final = 1;  // recursion state after parsing
};

template <class R>
ReturnCombinatorics<R> return_combinatorics(const std::vector<ClosestReturn<R>>& rec,
                                            const R& tie_tol) {
  using std::abs;
  ReturnCombinatorics<R> c;
  c.records = rec;
  if (rec.empty()) return c;
  if (abs(rec.front().dist) <= tie_tol && rec.front().time == 1) {
    // fixed point (or full-turn fixed point of the lift)
    c.periodic = true;
    c.period_q = 1;
    c.period_p = rec.front().winding;
    return c;
  }
  long long q_prev = 0, q_cur = 1;
  int sign_prev = 0;
  if (rec[0].time != 1) { c.violation = true; c.note = "first return time != 1"; return c; }
  if (rec[0].dist < 0) {
    // rotation number above 1/2: a_1 = 1, and q_1 = q_0 = 1 share the time-1
    // record, so the leading coefficient is implicit.
    c.cf.push_back(1);
    c.denominators.push_back(1);
    q_prev = 1;
    q_cur = 1;
  }
  // Otherwise the time-1 record is q_0 itself and a_1 is read off the next
  // record time.
  sign_prev = sign_of(rec[0].dist);
  for (std::size_t i = 1; i < rec.size(); ++i) {
    const auto& r = rec[i];
    if (abs(r.dist) <= tie_tol) {
      c.periodic = true;
      c.period_q = r.time;
      c.period_p = r.winding;
      return c;
    }
    long long num = r.time - q_prev;
    if (num <= 0 || num % q_cur != 0) {
      c.violation = true;
      c.note = "record times not of continued-fraction form";
      return c;
    }
    if (sign_prev != 0 && sign_of(r.dist) == sign_prev) {
      c.violation = true;
      c.note = "closest returns failed to alternate sides";
      return c;
    }
    long long a = num / q_cur;
    c.cf.push_back(a);
    c.denominators.push_back(r.time);
    q_prev = q_cur;
    q_cur = r.time;
    sign_prev = sign_of(r.dist);
  }
  c.q_prev_final = q_prev;
  c.q_cur_final = q_cur;
  return c;
}

/// Rotation number estimate.
template <class R>
struct RotationEstimate {
  R value = R(0);
  R error = R(1);
  bool converged = false;
  bool rational = false;
  long long q = 0, p = 0;
  long long iterations_used = 0;
};

/// Rotation number through closest returns: at a return time q with winding p
/// and signed distance d, the estimate (p + d)/q is exact for a rigid
/// rotation and accurate to O(|d|/q) in general. Rationals are detected by an
/// exact (ulp-level) return, or by convergence onto a periodic attractor
/// (the orbit's displacement over the candidate period settles down).
template <class R, class Map>
RotationEstimate<R> rotation_number(const Map& f, long long max_iter, const R& tol) {
  using std::abs;
  RotationEstimate<R> est;
  R tie = machine_eps<R>() * 100;
  auto scan = closest_return_scan<R>(f, R(0), max_iter, 256);
  const auto& rec = scan.records;
  if (rec.empty()) return est;
  const auto& last = rec.back();
  est.iterations_used = scan.scanned_until;
  if (abs(last.dist) <= tie) {
    est.rational = true;
    est.converged = true;
    est.q = last.time;
    est.p = last.winding;
    est.value = R(last.winding) / R(last.time);
    est.error = R(0);
    return est;
  }
  if (scan.scanned_until > 8 * last.time + 64) {
    // No further closest return for a long stretch: candidate mode-lock at
    // p/q from the last record. For a monotone degree-1 lift the displacement
    // D(x) = f^q(x) - x - p is sign-definite iff rho != p/q, so probing a
    // grid decides rationality soundly.
    using std::floor;
    long long q = last.time;
    long long p = last.winding;
    R dmin(10), dmax(-10);
    const int grid = 32;
    for (int i = 0; i < grid; ++i) {
      R x0 = R(i) / grid;
      R y = x0;
      for (long long s = 0; s < q; ++s) y = f(y);
      R D = y - x0 - R(p);
      if (D < dmin) dmin = D;
      if (D > dmax) dmax = D;
    }
    if (dmin <= tie && dmax >= -tie) {
      est.rational = true;
      est.converged = true;
      est.q = q;
      est.p = p;
      est.value = R(p) / R(q);
      est.error = R(0);
      return est;
    }
    est.value = R(p) / R(q) + (dmin + dmax) / (2 * q);
    est.error = (abs(dmin) > abs(dmax) ? abs(dmin) : abs(dmax)) / q;
    est.converged = est.error < tol;
    return est;
  }
  est.value = (R(last.winding) + last.dist) / R(last.time);
  est.error = abs(last.dist) / R(last.time);
  if (rec.size() >= 2) {
    const auto& prev = rec[rec.size() - 2];
    R e_prev = (R(prev.winding) + prev.dist) / R(prev.time);
    R spread = abs(est.value - e_prev);
    if (spread > est.error) est.error = spread;
  }
  est.converged = est.error < tol;
  return est;
}

/// Three-way comparison of the orbit combinatorics against a target rotation
/// number given by its continued fraction and its value.
/// Returns -1 / +1 when the rotation number is provably below / above the
/// target, 0 when indistinguishable within the iteration budget, and the
/// sentinel 2 when the orbit is not order-isomorphic to any rotation orbit.
template <class R, class Map>
int compare_with_cf(const Map& f, const R& base, long long max_time,
                    const std::vector<long long>& target_cf, const R& target_value,
                    long long* deviation_index = nullptr) {
  using std::abs;
  R tie = machine_eps<R>() * 100;
  auto scan = closest_return_scan<R>(f, base, max_time, 96);
  auto comb = return_combinatorics(scan.records, tie);
  auto side_from = [&](std::size_t k1based, bool orbit_larger) {
    // At the first differing partial quotient, odd index: larger a => smaller
    // rotation number; even index: larger a => larger.
    bool odd = (k1based % 2) == 1;
    return (orbit_larger == odd) ? -1 : +1;
  };
  std::size_t n = std::min(comb.cf.size(), target_cf.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (comb.cf[k] != target_cf[k]) {
      if (deviation_index) *deviation_index = comb.denominators[k];
      return side_from(k + 1, comb.cf[k] > target_cf[k]);
    }
  }
  if (comb.periodic) {
    // Locked on a rational p/q: compare its value against the target exactly.
    if (deviation_index) *deviation_index = comb.period_q;
    R diff = R(comb.period_p) - R(comb.period_q) * target_value;
    return diff < 0 ? -1 : +1;
  }
  if (comb.violation) {
    if (deviation_index)
      *deviation_index = comb.records.empty() ? 0 : comb.records.back().time;
    return 2;
  }
  if (comb.cf.size() < target_cf.size() && !scan.degenerate && !scan.records.empty()) {
    // No further record, but the elapsed time already bounds the next
    // partial quotient from below.
    long long a_low = (scan.scanned_until - comb.q_prev_final) / comb.q_cur_final;
    if (a_low > target_cf[comb.cf.size()]) {
      if (deviation_index) *deviation_index = scan.scanned_until;
      return side_from(comb.cf.size() + 1, true);
    }
  }
  if (deviation_index) *deviation_index = 0;
  return 0;
}

template <class R, class Map>
int golden_compare(const Map& f, const R& base, long long max_time,
                   long long* deviation_index = nullptr) {
  static const std::vector<long long> ones(96, 1);
  return compare_with_cf(f, base, max_time, ones, golden_mean<R>(), deviation_index);
}

/// Outcome of the Fibonacci-time side oracle.
struct FibonacciSideResult {
  int side = 0;            // -1: rotation number below golden, +1: above
  int anomaly_level = -1;  // index n of the Fibonacci time q_n that misbehaved
  long long q = 0;         // that return time
  int clean_levels = 0;    // levels passed before the anomaly
  bool sign_anomaly = false;       // alternation broke (return crossed the base)
  bool magnitude_anomaly = false;  // same-side distance grew instead of shrinking
};

/// Deep, O(budget)-time, O(1)-memory orientation oracle for golden tuning.
///
/// Golden combinatorics forces the signed distances u_n of the orbit at the
/// Fibonacci times q_n to alternate sides while shrinking. Near the tuned
/// parameter every u_n slides monotonically with the parameter, so the first
/// failure points in the direction of the error: a return that crossed the
/// base (sign anomaly), or drifted away from it on its own side (magnitude
/// anomaly), did so in the direction sign(u). Order-based, hence valid for
/// distorted maps where metric closest returns are not the combinatorial
/// ones -- but only perturbatively: callers must pre-localize the parameter
/// (the slide past a wrap renders the sign meaningless).
template <class R, class Map>
FibonacciSideResult fibonacci_side_compare(const Map& f, const R& base,
                                           long long max_time) {
  using std::abs;
  using std::floor;
  FibonacciSideResult res;
  R pos = wrap01(base);
  R base_pos = pos;
  long long q_prev = 0, q_cur = 1;  // Fibonacci times 1, 2, 3, 5, ...
  int level = 0;
  R u_prev(0), u_prev2(0);
  for (long long t = 1; t <= max_time; ++t) {
    R y = f(pos);
    R fl = floor(y);
    pos = y - fl;
    if (pos >= 1) { pos -= 1; }
    if (pos < 0) { pos += 1; }
    if (t == q_cur) {
      R u = signed_gap(pos, base_pos);
      if (level > 0 && (sign_of(u) == sign_of(u_prev) || sign_of(u) == 0)) {
        res.side = sign_of(u) == 0 ? sign_of(u_prev) : sign_of(u);
        res.anomaly_level = level;
        res.q = q_cur;
        res.sign_anomaly = true;
        return res;
      }
      if (level > 1 && abs(u) >= abs(u_prev2)) {
        res.side = sign_of(u);
        res.anomaly_level = level;
        res.q = q_cur;
        res.magnitude_anomaly = true;
        return res;
      }
      u_prev2 = u_prev;
      u_prev = u;
      res.clean_levels = level;
      ++level;
      long long q_next = q_cur + (q_prev == 0 ? 1 : q_prev);
      q_prev = q_cur;
      q_cur = q_next;
    }
  }
  return res;
}

/// Result of the circular-order comparison against the golden rotation.
struct OrderCheckResult {
  bool ok = true;
  long long first_bad_index = -1;  // smallest k whose insertion rank differs
  long long witness = -1;          // i < k on the wrong side of k
  bool degenerate = false;         // a tie within tolerance was hit
  long long rank_observed = -1;
  long long rank_expected = -1;
};

/// Compares the circular order of orbit.points[0..n) with the order of
/// {k*gamma mod 1}: each new point must land in the same insertion slot as
/// its golden reference. Ties within tie_tol are order violations by policy:
/// degenerate combinatorics must force a retune, not a pass.
template <class R>
OrderCheckResult order_conjugacy_check(const OrbitSegment<R>& orbit,
                                       std::size_t n_points,
                                       bool mirrored = false,
                                       std::optional<R> tie_tol_opt = std::nullopt) {
  using std::abs;
  OrderCheckResult res;
  std::size_t n = std::min(n_points, orbit.points.size());
  if (n < 3) return res;
  R tie_tol = tie_tol_opt ? *tie_tol_opt : machine_eps<R>() * 10;
  R g = golden_mean<R>();
  if (mirrored) g = 1 - g;
  std::vector<R> theta(n), ref(n);
  for (std::size_t i = 0; i < n; ++i) {
    theta[i] = wrap01(orbit.points[i] - orbit.points[0]);
    ref[i] = wrap01(R(static_cast<long long>(i)) * g);
  }
  for (std::size_t k = 1; k < n; ++k) {
    long long r_obs = 0, r_exp = 0;
    long long bad_i = -1;
    for (std::size_t i = 0; i < k; ++i) {
      if (i > 0 && abs(theta[i] - theta[k]) <= tie_tol) {
        res.ok = false;
        res.degenerate = true;
        res.first_bad_index = static_cast<long long>(k);
        res.witness = static_cast<long long>(i);
        return res;
      }
      bool obs = theta[i] < theta[k];
      bool exp = ref[i] < ref[k];
      if (obs) ++r_obs;
      if (exp) ++r_exp;
      if (obs != exp && bad_i < 0) bad_i = static_cast<long long>(i);
    }
    if (bad_i >= 0) {
      res.ok = false;
      res.first_bad_index = static_cast<long long>(k);
      res.witness = bad_i;
      res.rank_observed = r_obs;
      res.rank_expected = r_exp;
      return res;
    }
  }
  return res;
}

}  // namespace fibren
