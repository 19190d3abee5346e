#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "fibren/fixed_point.hpp"

namespace fibren {

/// Domain of the presentation function: (tau^2 X, tau^3 X), with the linear
/// piece tau*x up to tau*X and the rescaled branch beyond.
template <class R>
struct PresentationDomain {
  R lo, breakpoint, hi;
};

template <class R>
PresentationDomain<R> presentation_domain(const FixedPointMap<R>& fp) {
  R t = fp.tau;
  return {t * t * fp.X, t * fp.X, t * t * t * fp.X};
}

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class R>
R presentation_eval(const FixedPointMap<R>& fp, const R& x) {
  auto dom = presentation_domain(fp);
  if (x <= dom.lo || x >= dom.hi)
    throw DomainError("presentation_eval: argument outside (tau^2 X, tau^3 X)");
  if (x <= dom.breakpoint) return fp.tau * x;
  return fp.tau * fp.phi_ext(x / fp.tau);
}

/// First-return system of the presentation function on (x_c, X): branch n is
/// psi_n = tau^(2n+1) * phi on the interval K^n.
template <class R>
struct PresentationSystem {
  FixedPointMap<R> fp;
  R dom_lo, dom_hi;  // fundamental domain (x_c, X)
  struct Branch {
    int n;
    R k_lo, k_hi;
  };
  std::vector<Branch> branches;
  R truncation_gap;  // |X - x_c| minus the summed branch lengths

  R psi(int n, const R& x) const { return int_pow(fp.tau, 2 * n + 1) * fp.phi(x); }
  R psi_prime(int n, const R& x) const {
    return int_pow(fp.tau, 2 * n + 1) * fp.phi_prime(x);
  }
  R psi_inv(int n, const R& y) const {
    return fp.E_inv(odd_root(y / int_pow(fp.tau, 2 * n + 1), fp.ell));
  }
};

template <class R>
PresentationSystem<R> build_return_system(const FixedPointMap<R>& fp, int n_branches) {
  using std::abs;
  PresentationSystem<R> sys;
  sys.fp = fp;
  sys.dom_lo = fp.x_c;
  sys.dom_hi = fp.X;
  R total(0);
  for (int n = 0; n <= n_branches; ++n) {
    R scale = int_pow(fp.tau, 2 * n + 1);
    typename PresentationSystem<R>::Branch br;
    br.n = n;
    // phi on K^n ranges over (X/scale, x_c/scale), both positive and tiny
    R v_lo = fp.X / scale, v_hi = fp.x_c / scale;
    br.k_lo = fp.E_inv(odd_root(v_lo, fp.ell));
    br.k_hi = fp.E_inv(odd_root(v_hi, fp.ell));
    if (!(br.k_lo > sys.dom_lo && br.k_hi < sys.dom_hi && br.k_lo < br.k_hi))
      throw SolverFailure("build_return_system: branch escaped the fundamental domain");
    if (!sys.branches.empty() && !(br.k_hi < sys.branches.back().k_lo ||
                                   br.k_lo > sys.branches.back().k_hi)) {
      // branches accumulate to x_c from the right, ordered downward
      throw SolverFailure("build_return_system: branches overlap");
    }
    total += br.k_hi - br.k_lo;
    sys.branches.push_back(br);
  }
  // full disjointness (quadratic but tiny)
  for (std::size_t i = 0; i < sys.branches.size(); ++i)
    for (std::size_t j = i + 1; j < sys.branches.size(); ++j) {
      const auto &a = sys.branches[i], &b = sys.branches[j];
      if (!(a.k_hi < b.k_lo || b.k_hi < a.k_lo))
        throw SolverFailure("build_return_system: branches overlap");
    }
  sys.truncation_gap = (fp.X - fp.x_c) - total;
  return sys;
}

/// Preimage tree of 1 under the presentation function, expanded through the
/// linear inverse x/tau and the rescaled inverse tau * phi^{-1}(x/tau).
template <class R>
struct PreimageTree {
  struct Node {
    R value;
    int depth;
    long long parent;  // index into nodes, -1 for the root
    int branch;        // 0 linear, 1 nonlinear
  };
  std::vector<Node> nodes;
  int depth = 0;
  long long clipped = 0;  // linear preimages discarded for leaving the domain

  std::vector<R> values_at(int d) const {
    std::vector<R> v;
    for (const auto& n : nodes)
      if (n.depth <= d) v.push_back(n.value);
    std::sort(v.begin(), v.end());
    return v;
  }

  /// Largest gap between consecutive preimages collected through depth d.
  R max_gap(int d) const {
    auto v = values_at(d);
    R g(0);
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] - v[i - 1] > g) g = v[i] - v[i - 1];
    return g;
  }
};

template <class R>
PreimageTree<R> preimage_tree(const FixedPointMap<R>& fp, int depth) {
  auto dom = presentation_domain(fp);
  PreimageTree<R> tree;
  tree.depth = depth;
  tree.nodes.push_back({R(1), 0, -1, -1});
  std::size_t frontier_begin = 0;
  for (int d = 1; d <= depth; ++d) {
    std::size_t frontier_end = tree.nodes.size();
    for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
      R y = tree.nodes[i].value;
      R lin = y / fp.tau;
      if (lin > dom.lo && lin <= dom.breakpoint)
        tree.nodes.push_back({lin, d, static_cast<long long>(i), 0});
      else
        ++tree.clipped;
      R nl = fp.tau * fp.phi_inv(y / fp.tau);
      if (nl > dom.breakpoint && nl < dom.hi)
        tree.nodes.push_back({nl, d, static_cast<long long>(i), 1});
      else
        ++tree.clipped;
    }
    frontier_begin = frontier_end;
  }
  return tree;
}

/// The two-branch map of section-seven form: phi on (tau^2 X, tau X], the
/// rescaled branch on (tau X, tau^3 X). Its orbit of 0 is the post-critical
/// orbit.
template <class R>
R hmap_eval(const FixedPointMap<R>& fp, const R& x) {
  auto dom = presentation_domain(fp);
  if (x <= dom.breakpoint) return fp.phi_ext(x);
  return fp.tau * fp.phi_ext(x / fp.tau);
}

template <class R>
std::vector<R> hmap_orbit(const FixedPointMap<R>& fp, long long j_max) {
  std::vector<R> orbit;
  orbit.reserve(j_max + 1);
  R x(0);
  orbit.push_back(x);
  for (long long j = 1; j <= j_max; ++j) {
    x = hmap_eval(fp, x);
    orbit.push_back(x);
  }
  return orbit;
}

/// Match report between the forward orbit of 0 and the preimage tree of 1.
template <class R>
struct CorrespondenceReport {
  long long j_max = 0;
  int tree_depth = 0;
  long long orbit_matched = 0;    // orbit points found in the tree
  long long orbit_unmatched = 0;  // j <= j_max with no tree node within tol
  long long tree_unmatched = 0;   // tree nodes matching no orbit point
  long long extended_orbit = 0;   // orbit length used for the converse check
  R worst_match = R(0);
  bool in_window = true;  // orbit stayed in [x_c, tau x_c]
};

template <class R>
CorrespondenceReport<R> orbit_preimage_correspondence(const FixedPointMap<R>& fp,
                                                      long long j_max, int tree_depth,
                                                      const R& tol) {
  using std::abs;
  CorrespondenceReport<R> rep;
  rep.j_max = j_max;
  rep.tree_depth = tree_depth;
  auto tree = preimage_tree(fp, tree_depth);
  std::vector<R> tv;
  for (auto& n : tree.nodes) tv.push_back(n.value);
  std::sort(tv.begin(), tv.end());
  auto near = [&](const std::vector<R>& sorted, const R& x) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    R best(10);
    if (it != sorted.end()) best = abs(*it - x);
    if (it != sorted.begin()) {
      R alt = abs(*(it - 1) - x);
      if (alt < best) best = alt;
    }
    return best;
  };
  // the tree grows like the Fibonacci numbers, so an orbit this long covers
  // every node
  long long j_ext = 8;
  {
    long long fib_prev = 1, fib_cur = 1;
    for (int d = 0; d < tree_depth; ++d) {
      long long t = fib_cur + fib_prev;
      fib_prev = fib_cur;
      fib_cur = t;
    }
    j_ext = std::max<long long>(j_max + 1, 3 * fib_cur);
  }
  auto orbit = hmap_orbit(fp, j_ext);
  rep.extended_orbit = j_ext;
  R win_lo = fp.x_c, win_hi = fp.tau * fp.x_c;
  for (long long j = 1; j <= j_max; ++j)
    if (orbit[j] < win_lo - tol || orbit[j] > win_hi + tol) rep.in_window = false;
  for (long long j = 1; j <= j_max; ++j) {
    R gap = near(tv, orbit[j]);
    if (gap < tol) {
      ++rep.orbit_matched;
      if (gap > rep.worst_match) rep.worst_match = gap;
    } else {
      ++rep.orbit_unmatched;
    }
  }
  std::vector<R> ov(orbit.begin() + 1, orbit.end());
  std::sort(ov.begin(), ov.end());
  for (const R& v : tv)
    if (near(ov, v) >= tol) ++rep.tree_unmatched;
  return rep;
}

/// Non-escaping test for the first-return system: true when n_steps iterates
/// stay inside retained branches. Points landing within tol of a branch
/// endpoint are flagged undecidable.
template <class R>
struct MembershipResult {
  bool stays = false;
  bool undecidable = false;
  int escaped_at = -1;
};

template <class R>
MembershipResult<R> nonescaping_membership(const PresentationSystem<R>& sys, R x,
                                           int n_steps, const R& endpoint_tol) {
  using std::abs;
  MembershipResult<R> res;
  for (int s = 0; s < n_steps; ++s) {
    int hit = -1;
    for (const auto& br : sys.branches) {
      if (abs(x - br.k_lo) < endpoint_tol || abs(x - br.k_hi) < endpoint_tol) {
        res.undecidable = true;
        res.escaped_at = s;
        return res;
      }
      if (x > br.k_lo && x < br.k_hi) {
        hit = br.n;
        break;
      }
    }
    if (hit < 0) {
      res.escaped_at = s;
      return res;
    }
    x = sys.psi(hit, x);
    if (x <= sys.dom_lo || x >= sys.dom_hi) {
      res.escaped_at = s;
      return res;
    }
  }
  res.stays = true;
  return res;
}

}  // namespace fibren
