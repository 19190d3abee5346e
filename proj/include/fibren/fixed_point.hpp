#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "fibren/chebyshev.hpp"
#include "fibren/renorm.hpp"

namespace fibren {

enum class MapKind { cover, pair };

inline const char* to_string(MapKind k) { return k == MapKind::cover ? "cover" : "pair"; }

/// A solved renormalization fixed point. The branch is phi = E^ell with E a
/// monotone diffeomorphism represented as a Chebyshev series on a real core
/// interval; evaluations outside the core use the functional equation
/// phi = tau^2 (phi o G), G = tau^{-1} o phi o tau^{-1}.
template <class R>
struct FixedPointMap {
  MapKind kind = MapKind::cover;
  int ell = 3;
  R tau = R(0);
  R alpha = R(0);  // tau^{1/ell}, real odd root, < -1
  Cheb<R> E;
  Cheb<R> dE;
  R x_c = R(0);  // critical point: the zero of E
  R X = R(0);    // the solution of phi(X) = tau X in (1/tau, 0)

  // diagnostics
  R residual_norm = R(0);
  int newton_iterations = 0;
  R coeff_tail = R(0);
  R seed_residual = R(0);

  R core_lo() const { return E.lo; }
  R core_hi() const { return E.hi; }

  R E_at(const R& x) const { return E(x); }
  R phi(const R& x) const { return int_pow(E(x), ell); }
  R phi_prime(const R& x) const {
    R e = E(x);
    return ell * int_pow(e, ell - 1) * dE(x);
  }
  R G(const R& x) const { return phi(x / tau) / tau; }
  R G_prime(const R& x) const { return phi_prime(x / tau) / (tau * tau); }

  /// Orientation-reversing square root of G; for the pair kind it is the
  /// one-step continuation symmetry phi = tau * (phi o Gamma).
  R Gamma(const R& x) const { return tau * phi(x / (tau * tau)); }

  /// phi continued beyond the core by the functional equation. Covers use
  /// phi = tau^2 (phi o G): to the left of the core G marches arguments into
  /// it (the critical point attracts between the repelling point tau^2 X and
  /// the core). The pair kind uses phi = tau (phi o Gamma), which reaches the
  /// core in one step on both sides.
  R phi_ext(const R& x, int depth = 0) const {
    if (x >= core_lo() && x <= core_hi()) return phi(x);
    if (depth > 80) throw std::runtime_error("phi_ext: continuation recursion exhausted");
    if (kind == MapKind::pair) return tau * phi_ext(Gamma(x), depth + 1);
    return tau * tau * phi_ext(G_ext(x, depth + 1), depth + 1);
  }
  R G_ext(const R& x, int depth = 0) const {
    R z = x / tau;
    if (z >= core_lo() && z <= core_hi()) return phi(z) / tau;
    return phi_ext(z, depth + 1) / tau;
  }
  R phi_prime_ext(const R& x, int depth = 0) const {
    if (x >= core_lo() && x <= core_hi()) return phi_prime(x);
    if (depth > 80) throw std::runtime_error("phi_prime_ext: recursion exhausted");
    if (kind == MapKind::pair)
      return phi_prime_ext(Gamma(x), depth + 1) * phi_prime_ext(x / (tau * tau), depth + 1) / tau;
    // phi = tau^2 phi(G), G' = phi'(x/tau)/tau^2
    return phi_prime_ext(G_ext(x, depth + 1), depth + 1) * phi_prime_ext(x / tau, depth + 1);
  }

  /// Inverse of E on the core by safeguarded bracketed iteration.
  R E_inv(const R& y) const {
    auto fn = [&](const R& x) { return E(x) - y; };
    R a = core_lo(), b = core_hi();
    R fa = fn(a), fb = fn(b);
    if (sign_of(fa) == sign_of(fb))
      throw std::runtime_error("E_inv: value outside the core range");
    R xtol = machine_eps<R>() * (abs_r(a) + abs_r(b) + 1) * 4;
    return bracketed_root(fn, a, b, fa, fb, xtol, 400);
  }

  /// phi^{-1} with continuation: values below the core image use
  /// phi^{-1}(w) = G^{-1}(phi^{-1}(w / tau^2)), values above likewise.
  R phi_inv(const R& w, int depth = 0) const {
    if (depth > 80) throw std::runtime_error("phi_inv: recursion exhausted");
    R w_lo = phi(core_lo()), w_hi = phi(core_hi());
    if (w >= w_lo && w <= w_hi) return E_inv(odd_root(w, ell));
    return G_inv(phi_inv(w / (tau * tau), depth + 1), depth + 1);
  }
  R G_inv(const R& u, int depth = 0) const {
    // G(z) = u  <=>  z = tau * phi^{-1}(tau u)
    return tau * phi_inv(tau * u, depth + 1);
  }

 private:
  static R abs_r(const R& x) {
    using std::abs;
    return abs(x);
  }
};

template <class R>
struct ResidualVector {
  std::vector<R> nodes;
  std::vector<R> residuals;
  R norm = R(0);  // sup norm
  std::vector<int> flagged;  // nodes whose compositions left the core

  void finalize() {
    using std::abs;
    norm = R(0);
    for (auto& r : residuals)
      if (abs(r) > norm) norm = abs(r);
  }
};

/// Unknowns of the collocation system: the E coefficients and tau jointly.
template <class R>
struct CandidateSystem {
  MapKind kind = MapKind::cover;
  int ell = 3;
  Cheb<R> E;
  R tau = R(0);
  std::vector<R> nodes;             // composition-equation nodes (central window)
  std::vector<R> pair_nodes;        // rescaling-relation nodes (pair case)
  std::vector<R> commutator_nodes;  // pair case only

  R alpha() const { return odd_root(tau, ell); }

  Eigen::Matrix<R, Eigen::Dynamic, 1> pack() const {
    Eigen::Matrix<R, Eigen::Dynamic, 1> u(E.c.size() + 1);
    u.head(E.c.size()) = E.c;
    u[E.c.size()] = tau;
    return u;
  }
  void unpack(const Eigen::Matrix<R, Eigen::Dynamic, 1>& u) {
    E.c = u.head(u.size() - 1);
    tau = u[u.size() - 1];
  }
};

namespace detail {

template <class R>
R phi_of(const Cheb<R>& E, int ell, const R& x) {
  return int_pow(E(x), ell);
}

template <class R>
R phi_prime_of(const Cheb<R>& E, const Cheb<R>& dE, int ell, const R& x) {
  return ell * int_pow(E(x), ell - 1) * dE(x);
}

template <class R>
bool in_core(const Cheb<R>& E, const R& x, const R& slack) {
  return x >= E.lo - slack && x <= E.hi + slack;
}

}  // namespace detail

/// Residual of the covering fixed-point equation at the candidate:
/// E(x) - alpha^2 E(phi(x/tau)/tau) at the nodes, plus the normalization
/// rows E(0) = 1 and phi'(1/tau) = 1.
template <class R>
ResidualVector<R> residual_cover(const CandidateSystem<R>& s) {
  ResidualVector<R> out;
  R a2 = s.alpha() * s.alpha();
  Cheb<R> dE = s.E.derivative();
  R slack = (s.E.hi - s.E.lo) / 16;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const R& x = s.nodes[i];
    R inner = detail::phi_of(s.E, s.ell, x / s.tau) / s.tau;
    if (!detail::in_core(s.E, inner, slack) || !detail::in_core(s.E, x / s.tau, slack))
      out.flagged.push_back(static_cast<int>(i));
    out.nodes.push_back(x);
    out.residuals.push_back(s.E(x) - a2 * s.E(inner));
  }
  out.nodes.push_back(R(0));
  out.residuals.push_back(s.E(R(0)) - 1);
  out.nodes.push_back(1 / s.tau);
  out.residuals.push_back(detail::phi_prime_of(s.E, dE, s.ell, 1 / s.tau) - 1);
  out.finalize();
  return out;
}

/// Residual of the commuting-pair equations: the composition equation on the
/// central window (which pins E there), the rescaling relation
/// f_+ = alpha o f_+ o f_- o alpha^{-1} on the unit window -- in the folded
/// coordinate alpha^{-1} E(tau x) = E(tau phi(x/tau)), which pins E left of
/// 0 -- plus commutator rows f_+(f_-(y)) - f_-(f_+(y)) near 0 and the two
/// normalization rows.
template <class R>
ResidualVector<R> residual_pair(const CandidateSystem<R>& s) {
  ResidualVector<R> out;
  R al = s.alpha();
  R a2 = al * al;
  Cheb<R> dE = s.E.derivative();
  R slack = (s.E.hi - s.E.lo) / 16;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const R& x = s.nodes[i];
    R inner = detail::phi_of(s.E, s.ell, x / s.tau) / s.tau;
    if (!detail::in_core(s.E, inner, slack) || !detail::in_core(s.E, x / s.tau, slack))
      out.flagged.push_back(static_cast<int>(i));
    out.nodes.push_back(x);
    out.residuals.push_back(s.E(x) - a2 * s.E(inner));
  }
  for (std::size_t i = 0; i < s.pair_nodes.size(); ++i) {
    const R& x = s.pair_nodes[i];
    R inner = s.tau * detail::phi_of(s.E, s.ell, x / s.tau);
    if (!detail::in_core(s.E, inner, slack) || !detail::in_core(s.E, s.tau * x, slack))
      out.flagged.push_back(static_cast<int>(s.nodes.size() + i));
    out.nodes.push_back(x);
    out.residuals.push_back(s.E(s.tau * x) / al - s.E(inner));
  }
  for (const R& y : s.commutator_nodes) {
    // f_+(f_-) - f_-(f_+) in the folded coordinate:
    // alpha^{-1} E(tau phi(y)) - E(phi(tau y)/tau)
    R lhs = s.E(s.tau * detail::phi_of(s.E, s.ell, y)) / al;
    R rhs = s.E(detail::phi_of(s.E, s.ell, s.tau * y) / s.tau);
    out.nodes.push_back(y);
    out.residuals.push_back(lhs - rhs);
  }
  out.nodes.push_back(R(0));
  out.residuals.push_back(s.E(R(0)) - 1);
  out.nodes.push_back(1 / s.tau);
  out.residuals.push_back(detail::phi_prime_of(s.E, dE, s.ell, 1 / s.tau) - 1);
  out.finalize();
  return out;
}

template <class R>
ResidualVector<R> residual_of(const CandidateSystem<R>& s) {
  return s.kind == MapKind::cover ? residual_cover(s) : residual_pair(s);
}

template <class R>
struct SolverOptions {
  int max_iter = 48;
  R tol = R(0);      // 0: pick from precision
  R fd_step = R(0);  // 0: pick from precision
  int max_halvings = 24;
  int monotone_grid = 48;

  R tol_or_default() const {
    if (tol > 0) return tol;
    return machine_eps<R>() * 1024;
  }
  R fd_or_default() const {
    using std::pow;
    if (fd_step > 0) return fd_step;
    return pow(R(10), -(digits10_of<R> / 2));
  }
};

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class R>
bool increasing_on_core(const Cheb<R>& E, int grid) {
  // the outermost edge strips carry no collocation constraints, so their
  // coefficients wiggle freely during the iteration; check where E is used
  Cheb<R> dE = E.derivative();
  R inset = (E.hi - E.lo) / 24;
  for (int i = 0; i <= grid; ++i) {
    R x = E.lo + inset + (E.hi - E.lo - 2 * inset) * i / grid;
    if (dE(x) <= 0) return false;
  }
  return true;
}

}  // namespace detail

template <class R>
R locate_X(const FixedPointMap<R>& fp);

/// Newton iteration on the joint (coefficients, tau) unknowns with a
/// finite-difference Jacobian, least-squares QR step and step halving.
template <class R>
FixedPointMap<R> newton_solve(CandidateSystem<R> sys, const SolverOptions<R>& opt = {}) {
  using Mat = Eigen::Matrix<R, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<R, Eigen::Dynamic, 1>;
  using std::abs;
  const R tol = opt.tol_or_default();
  const R h = opt.fd_or_default();

  auto eval = [&](const CandidateSystem<R>& s) {
    ResidualVector<R> rv = residual_of(s);
    Vec r(rv.residuals.size());
    for (std::size_t i = 0; i < rv.residuals.size(); ++i) r[i] = rv.residuals[i];
    return r;
  };

  Vec u = sys.pack();
  Vec r = eval(sys);
  R norm = r.template lpNorm<Eigen::Infinity>();
  R seed_norm = norm;
  int iters = 0;
  for (; iters < opt.max_iter && norm > tol; ++iters) {
    const int nu = static_cast<int>(u.size());
    const int nr = static_cast<int>(r.size());
    Mat J(nr, nu);
    for (int j = 0; j < nu; ++j) {
      R scale = abs(u[j]) > 1 ? abs(u[j]) : R(1);
      R hj = h * scale;
      CandidateSystem<R> sp = sys, sm = sys;
      Vec up = u, um = u;
      up[j] += hj;
      um[j] -= hj;
      sp.unpack(up);
      sm.unpack(um);
      J.col(j) = (eval(sp) - eval(sm)) / (2 * hj);
    }
    Vec du = Eigen::ColPivHouseholderQR<Mat>(J).solve(r);
    R step(1);
    bool accepted = false;
    for (int half = 0; half <= opt.max_halvings; ++half) {
      CandidateSystem<R> trial = sys;
      Vec ut = u - step * du;
      trial.unpack(ut);
      if (trial.tau < -1 && detail::increasing_on_core(trial.E, opt.monotone_grid)) {
        Vec rt = eval(trial);
        R nt = rt.template lpNorm<Eigen::Infinity>();
        if (nt < norm || (half == opt.max_halvings && nt < norm * 2)) {
          sys = trial;
          u = ut;
          r = rt;
          norm = nt;
          accepted = true;
          break;
        }
      }
      step /= 2;
    }
    if (!accepted) {
      // possibly converged to the floor of the finite-difference Jacobian
      if (norm < tol * 1000) break;
      throw SolverFailure("newton_solve: no acceptable step (residual " +
                          to_decimal_string(norm, 3) + ")");
    }
    if (du.template lpNorm<Eigen::Infinity>() < machine_eps<R>() * 64) break;
  }
  if (norm > tol * 1000)
    throw SolverFailure("newton_solve: did not converge (residual " +
                        to_decimal_string(norm, 3) + ")");

  FixedPointMap<R> fp;
  fp.kind = sys.kind;
  fp.ell = sys.ell;
  fp.tau = sys.tau;
  fp.alpha = odd_root(sys.tau, sys.ell);
  fp.E = sys.E;
  fp.dE = sys.E.derivative();
  fp.residual_norm = norm;
  fp.newton_iterations = iters;
  fp.coeff_tail = sys.E.tail_ratio();
  fp.seed_residual = seed_norm;

  // critical point: zero of E left of 0
  {
    auto fn = [&](const R& x) { return fp.E(x); };
    R a = fp.core_lo(), b = R(0);
    R fa = fn(a), fb = fn(b);
    if (sign_of(fa) >= 0 || sign_of(fb) <= 0)
      throw SolverFailure("newton_solve: E has no zero left of 0 in the core");
    fp.x_c = bracketed_root(fn, a, b, fa, fb, machine_eps<R>() * 8, 400);
  }
  fp.X = locate_X(fp);
  return fp;
}

/// The unique point X in (1/tau, 0) with phi(X) = tau X, found by bisection;
/// the sign change is guaranteed by phi(1/tau) = 1/tau^2 and phi(0) = 1.
template <class R>
R locate_X(const FixedPointMap<R>& fp) {
  auto fn = [&](const R& x) { return fp.phi(x) / fp.tau - x; };
  R a = 1 / fp.tau, b = R(0);
  R fa = fn(a), fb = fn(b);
  if (sign_of(fa) == sign_of(fb))
    throw SolverFailure("locate_X: no sign change in (1/tau, 0)");
  return bracketed_root(fn, a, b, fa, fb, machine_eps<R>() * 8, 400);
}

template <class R>
void set_nodes(CandidateSystem<R>& sys, int basis);

/// Seed for the solver taken from renormalized dynamics: a least-squares
/// Chebyshev fit of the ell-th root of the rescaled central branch, with tau
/// from the scaling sequence. For the pair system the core must extend left
/// of the sampled window, so a narrow preliminary fit is continued there by
/// the functional equation before the final fit.
template <class R, class Rescaled>
CandidateSystem<R> seed_from_dynamics(const Rescaled& central, const R& tau_seed, int ell,
                                      MapKind kind, int basis) {
  CandidateSystem<R> sys;
  sys.kind = kind;
  sys.ell = ell;
  sys.tau = tau_seed;
  R alpha = odd_root(tau_seed, ell);

  R lo = central.dom_central_lo, hi = central.dom_central_hi;
  R W = hi - lo;
  // the rescaled branch is an analytic iterate, evaluable slightly past its
  // box; the margin keeps the critical point and x_c/tau inside the core
  R slo = lo - W / 48, shi = hi + W / 48;
  const int m = 4 * basis;
  std::vector<R> xs, ys;
  for (const R& x : chebyshev_points(slo, shi, m)) {
    xs.push_back(x);
    ys.push_back(odd_root(central.central(x), ell));
  }
  Cheb<R> narrow = Cheb<R>::fit(slo, shi, xs, ys, basis);

  if (kind == MapKind::cover) {
    sys.E = narrow;
  } else {
    // evaluate E on the wide pair core through E = alpha * (E o Gamma),
    // Gamma(x) = tau * phi(x/tau^2), which lands inside the sampled window
    // in one step on both sides
    R wide_lo = R(1.18) * tau_seed;
    R wide_hi = shi;
    std::function<R(R, int)> E_ext = [&](R x, int depth) -> R {
      if (x >= slo && x <= shi) return narrow(x);
      if (depth > 8) throw SolverFailure("seed_from_dynamics: continuation blew up");
      R gamma_x = tau_seed * int_pow(E_ext(x / (tau_seed * tau_seed), depth + 1), ell);
      return alpha * E_ext(gamma_x, depth + 1);
    };
    std::vector<R> wx, wy;
    for (const R& x : chebyshev_points(wide_lo, wide_hi, m)) {
      wx.push_back(x);
      wy.push_back(E_ext(x, 0));
    }
    sys.E = Cheb<R>::fit(wide_lo, wide_hi, wx, wy, basis);
  }

  set_nodes(sys, basis);
  return sys;
}

/// Collocation nodes for the system; the pair case adds commutator nodes
/// around 0, kept small enough that tau*phi stays inside the core.
template <class R>
void set_nodes(CandidateSystem<R>& sys, int basis) {
  int n_nodes = basis + 1;
  sys.commutator_nodes.clear();
  if (sys.kind == MapKind::cover) {
    R nlo = sys.E.lo + (sys.E.hi - sys.E.lo) / 50;
    R nhi = sys.E.hi - (sys.E.hi - sys.E.lo) / 50;
    sys.nodes = chebyshev_points(nlo, nhi, n_nodes);
  } else {
    // composition rows on the central window (x_c, x_c/tau)
    R x_c_est;
    {
      auto fn = [&](const R& x) { return sys.E(x); };
      R a = sys.E.lo, b = R(0);
      x_c_est = bracketed_root(fn, a, b, fn(a), fn(b), machine_eps<R>() * 64, 200);
    }
    R nlo = x_c_est * R(0.98);
    R nhi = (x_c_est / sys.tau) * R(0.98);
    sys.nodes = chebyshev_points(nlo, nhi, n_nodes);
    sys.pair_nodes = chebyshev_points(R(1) / 50, R(1) - R(1) / 20, (n_nodes + 1) / 2);
    R delta = abs_of(sys.E.lo) / 24;
    auto tau_phi = [&](const R& y) { return sys.tau * int_pow(sys.E(y), sys.ell); };
    for (int guard = 0; guard < 60; ++guard) {
      if (tau_phi(delta) > sys.E.lo * R(0.98) && tau_phi(-delta) > sys.E.lo * R(0.98)) break;
      delta /= 2;
    }
    for (int i = 0; i < 6; ++i)
      sys.commutator_nodes.push_back(-delta + 2 * delta * i / 5);
  }
}

/// Seed by continuation from a previously solved exponent.
template <class R>
CandidateSystem<R> seed_from_previous(const FixedPointMap<R>& prev, int new_ell,
                                      const R& tau_guess, int basis) {
  CandidateSystem<R> sys;
  sys.kind = prev.kind;
  sys.ell = new_ell;
  sys.tau = tau_guess;
  const int m = 4 * basis;
  std::vector<R> xs, ys;
  for (const R& x : chebyshev_points(prev.core_lo(), prev.core_hi(), m)) {
    xs.push_back(x);
    ys.push_back(odd_root(prev.phi(x), new_ell));
  }
  sys.E = Cheb<R>::fit(prev.core_lo(), prev.core_hi(), xs, ys, basis);
  set_nodes(sys, basis);
  return sys;
}

/// Named absolute errors of the fixed-point identities.
template <class R>
struct IdentityReport {
  R phi_at_zero;        // |phi(0) - 1|
  R phi_at_inv_tau;     // |phi(1/tau) - 1/tau^2|
  R phi_prime_inv_tau;  // |phi'(1/tau) - 1|
  R phi_xc_over_tau;    // |phi(x_c/tau) - tau x_c|
  R phi_G_sup;          // sup |phi(G x) - phi(x)/tau^2| on a grid
  R G_prime_xc;         // |G'(x_c) - 1/alpha^2|
  R schwarzian_max;     // max over grid of positive part of S[E]
  bool ordering_ok;     // 1 < tau x_c < tau^2
  R ordering_margin;

  R worst() const {
    R w = phi_at_zero;
    for (R v : {phi_at_inv_tau, phi_prime_inv_tau, phi_xc_over_tau, phi_G_sup, G_prime_xc})
      if (v > w) w = v;
    return w;
  }
};

template <class R>
IdentityReport<R> verify_identities(const FixedPointMap<R>& fp, int grid = 200) {
  using std::abs;
  IdentityReport<R> rep;
  R t = fp.tau;
  rep.phi_at_zero = abs(fp.phi(R(0)) - 1);
  rep.phi_at_inv_tau = abs(fp.phi(1 / t) - 1 / (t * t));
  rep.phi_prime_inv_tau = abs(fp.phi_prime(1 / t) - 1);
  rep.phi_xc_over_tau = abs(fp.phi(fp.x_c / t) - t * fp.x_c);
  rep.phi_G_sup = R(0);
  // grid inside the central window (x_c, x_c/tau), where G stays in the core
  {
    R lo = fp.x_c + (fp.x_c / t - fp.x_c) / 64;
    R hi = fp.x_c / t - (fp.x_c / t - fp.x_c) / 64;
    for (int i = 0; i <= grid; ++i) {
      R x = lo + (hi - lo) * i / grid;
      R e = abs(fp.phi(fp.G(x)) - fp.phi(x) / (t * t));
      if (e > rep.phi_G_sup) rep.phi_G_sup = e;
    }
  }
  rep.G_prime_xc = abs(fp.G_prime(fp.x_c) - 1 / (fp.alpha * fp.alpha));
  // Schwarzian of E on the core (should be <= 0 up to roundoff)
  {
    Cheb<R> d1 = fp.dE;
    Cheb<R> d2 = d1.derivative();
    Cheb<R> d3 = d2.derivative();
    rep.schwarzian_max = R(0);
    R lo = fp.core_lo() + (fp.core_hi() - fp.core_lo()) / 32;
    R hi = fp.core_hi() - (fp.core_hi() - fp.core_lo()) / 32;
    for (int i = 0; i <= grid; ++i) {
      R x = lo + (hi - lo) * i / grid;
      R s = d3(x) / d1(x) - R(3) / 2 * int_pow(d2(x) / d1(x), 2);
      if (s > rep.schwarzian_max) rep.schwarzian_max = s;
    }
  }
  R txc = t * fp.x_c;
  rep.ordering_ok = (txc > 1) && (txc < t * t);
  R m1 = txc - 1, m2 = t * t - txc;
  rep.ordering_margin = m1 < m2 ? m1 : m2;
  return rep;
}

/// The three real fixed points of G for a covering fixed point, with
/// numerically measured multipliers.
template <class R>
struct GFixedPoints {
  std::vector<R> points;       // tau phi(x_c/tau^2), tau^2 X, x_c
  std::vector<R> multipliers;  // G' at each
  std::vector<R> residuals;    // |G(p) - p|
  int sign_changes = 0;        // roots of G - id detected on a scan grid
};

template <class R>
GFixedPoints<R> fixed_points_of_G(const FixedPointMap<R>& fp, int scan_grid = 4096) {
  using std::abs;
  GFixedPoints<R> out;
  R t = fp.tau;
  std::vector<R> pts = {t * fp.phi(fp.x_c / (t * t)), t * t * fp.X, fp.x_c};
  for (const R& p : pts) {
    out.points.push_back(p);
    out.residuals.push_back(abs(fp.G_ext(p) - p));
    out.multipliers.push_back(fp.phi_prime_ext(p / t) / (t * t));
  }
  // count sign changes of G - id on (tau^2 X, 0)
  R lo = t * t * fp.X, hi = R(0);
  R w = hi - lo;
  lo += w / 1024;
  hi -= w / 1024;
  int prev = 0;
  for (int i = 0; i <= scan_grid; ++i) {
    R x = lo + (hi - lo) * i / scan_grid;
    int s = sign_of(fp.G_ext(x) - x);
    if (i > 0 && s != 0 && prev != 0 && s != prev) ++out.sign_changes;
    if (s != 0) prev = s;
  }
  return out;
}

}  // namespace fibren
