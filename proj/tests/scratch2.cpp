#include <chrono>
#include <cstdio>
#include "fibren/circle_map.hpp"
#include "fibren/rotation.hpp"
#include "fibren/tuning.hpp"
using namespace fibren;
int main() {
  using R = Big;
  auto t0 = std::chrono::steady_clock::now();
  auto cfac = [](R w) { return make_cover_family<R>(3, w); };
  auto tc = tune_fibonacci_cover<R>(cfac, 12);
  auto t1 = std::chrono::steady_clock::now();
  std::printf("=> ok=%d omega=%s mirrored=%d msg='%s' [%.1fs]\n", tc.ok,
              to_decimal_string(tc.omega, 45).c_str(), tc.mirrored, tc.message.c_str(),
              std::chrono::duration<double>(t1 - t0).count());
  return 0;
}
