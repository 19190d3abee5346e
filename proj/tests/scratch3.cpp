#include <chrono>
#include <cstdio>
#include "fibren/circle_map.hpp"
#include "fibren/fixed_point.hpp"
#include "fibren/renorm.hpp"
#include "fibren/rotation.hpp"
#include "fibren/tuning.hpp"
using namespace fibren;
int main() {
  using R = double;
  auto fac = [](R w) { return make_homeo_family<R>(3, w); };
  auto t = tune_rotation_golden<R>(fac);
  auto f = fac(t.omega);
  RenormLadder<R, CircleMapLift<R>> lad(f, f.critical_point, 13);
  auto s = lad.scaling_sequence();
  std::printf("dyn tau = %.10f (err est %.1e)\n", (double)s.extrapolated, (double)s.error_estimate);
  auto resc = lad.renormalize(11);
  std::printf("central domain [%.6f, %.6f], value at 0: %.6f (expect 1)\n",
              (double)resc.dom_central_lo, (double)resc.dom_central_hi, (double)resc.central(0.0));
  auto sys = seed_from_dynamics<R>(resc, s.extrapolated, 3, MapKind::pair, 24);
  auto rv0 = residual_pair(sys);
  std::printf("seed residual norm = %.3e (flagged %zu)\n", (double)rv0.norm, rv0.flagged.size());
  try {
    auto t0 = std::chrono::steady_clock::now();
    auto fp = newton_solve(sys);
    auto t1 = std::chrono::steady_clock::now();
    std::printf("PAIR solved: tau=%.15f iters=%d resid=%.2e tail=%.2e [%.2fs]\n", (double)fp.tau,
                fp.newton_iterations, (double)fp.residual_norm, (double)fp.coeff_tail,
                std::chrono::duration<double>(t1 - t0).count());
    std::printf("x_c=%.10f X=%.10f x_c/tau^2=%.10f (homeo: X = x_c/tau^2?)\n", (double)fp.x_c,
                (double)fp.X, (double)(fp.x_c / (fp.tau * fp.tau)));
    auto rep = verify_identities(fp);
    std::printf("identities: phi0=%.1e inv_tau=%.1e prime=%.1e xc=%.1e phiG=%.1e Gp=%.1e Schw+=%.1e ord=%d\n",
                (double)rep.phi_at_zero, (double)rep.phi_at_inv_tau, (double)rep.phi_prime_inv_tau,
                (double)rep.phi_xc_over_tau, (double)rep.phi_G_sup, (double)rep.G_prime_xc,
                (double)rep.schwarzian_max, rep.ordering_ok);
    std::printf("two-route: |tau_dyn - tau_newton| = %.2e\n",
                (double)std::abs(s.extrapolated - fp.tau));
  } catch (const std::exception& e) {
    std::printf("SOLVE FAILED: %s\n", e.what());
  }
  return 0;
}
