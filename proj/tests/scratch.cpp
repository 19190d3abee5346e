// Exploration harness used while bringing up the pipeline.
#include <cmath>
#include <cstdio>

#include "fibren/circle_map.hpp"
#include "fibren/rotation.hpp"
#include "fibren/tuning.hpp"

using namespace fibren;

int main() {
  using R = double;
  R g = golden_mean<R>();

  // side oracle on rigid rotations with known side
  for (double rho : {0.60, 0.6180, 0.6181, 0.6180339887, 0.61803398875,
                     2.0 / 3, 0.5, 3.0 / 5, 5.0 / 8, 13.0 / 21, 21.0 / 34,
                     0.618033988749894848}) {
    RigidRotation<R> r{rho};
    auto s = fibonacci_side_compare<R>(r, R(0), 40'000'000);
    std::printf("  side(%.18g) = %+d at level %d q=%lld (true %+d)\n", rho, s.side,
                s.anomaly_level, s.q, rho < g ? -1 : (rho > g ? 1 : 0));
  }

  // rationals
  RigidRotation<R> r37{3.0 / 7};
  auto est2 = rotation_number<R>(r37, 10000, R(1e-13));
  std::printf("rho(3/7): rational=%d p=%lld q=%lld\n", est2.rational, est2.p, est2.q);

  // tune the ell=3 homeo family
  auto factory = [](R w) { return make_homeo_family<R>(3, w); };
  TuneOptions opt;
  auto t = tune_rotation_golden<R>(factory, opt);
  std::printf("tuned omega* = %.17g bracket %.3g depth %lld\n", (double)t.omega,
              (double)(t.bracket_hi - t.bracket_lo), t.comparator_depth);
  auto fm = factory(t.omega);
  auto chk = rotation_number<R>(fm, 3'000'000, R(1e-10));
  std::printf("rho(F_omega*) = %.17g  |rho-gamma| = %.3g err=%.3g conv=%d\n", chk.value,
              std::fabs(chk.value - g), chk.error, chk.converged);
  auto rec = closest_return_records<R>(fm, fm.critical_value(), fibonacci_ll(17), 40);
  std::printf("tuned metric return times: ");
  for (auto& r : rec) std::printf("%lld ", r.time);
  std::printf("\n");
  auto orbit = forward_orbit<R>(fm, fm.critical_point, fibonacci_ll(15));
  auto oc = order_conjugacy_check(orbit, fibonacci_ll(15) + 1);
  std::printf("order check through q15: ok=%d bad=%lld\n", oc.ok, oc.first_bad_index);

  // locked map: omega=0 has a fixed point at 0
  auto f0 = factory(0.0);
  auto e0 = rotation_number<R>(f0, 10000, R(1e-10));
  std::printf("rho(F_0) = %.3g rational=%d p=%lld q=%lld\n", e0.value, e0.rational, e0.p, e0.q);

  // half target
  auto th = tune_rotation_rational<R>(factory, 1, 2, opt);
  auto eh = rotation_number<R>(factory(th.omega), 100000, R(1e-12));
  std::printf("tuned to 1/2: omega=%.6f rho rational=%d %lld/%lld\n", (double)th.omega,
              eh.rational, eh.p, eh.q);

  // cover tuning, ell=3, moderate depth
  auto cfac = [](R w) { return make_cover_family<R>(3, w); };
  auto tc = tune_fibonacci_cover<R>(cfac, 12, opt);
  std::printf("cover tuned: ok=%d omega=%.17g msg=%s depth=%lld verified=%lld\n", tc.ok,
              (double)tc.omega, tc.message.c_str(), tc.comparator_depth, tc.verified_depth);
  if (tc.ok) {
    auto fc = cfac(tc.omega);
    auto oc2 = order_conjugacy_check(forward_orbit<R>(fc, fc.critical_point, fibonacci_ll(15)),
                                     fibonacci_ll(15) + 1);
    std::printf("cover order check through q15: ok=%d bad=%lld\n", oc2.ok, oc2.first_bad_index);
  }
  return 0;
}
