// Timing for the hot kernels: prefix vs direct partition recursion, and
// replicate throughput at 1 worker vs the OpenMP default.
#include <chrono>
#include <cstdio>
#include <vector>

#include "oy/environment.hpp"
#include "oy/lpp.hpp"
#include "oy/parallel.hpp"
#include "oy/partition.hpp"
#include "oy/rng.hpp"

namespace {

template <class F>
double seconds(F&& f) {
  const auto a = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - a).count();
}

volatile double sink = 0.0;

}  // namespace

int main() {
  using namespace oy;
  const TimeGrid small(0.0, 4.0, 0x1.0p-7);
  const Environment env = Environment::generate(7, small, 0, 8);
  std::printf("%-36s %10s\n", "kernel", "seconds");
  std::printf("%-36s %10.4f\n", "forward_slices (512 pts, 8 levels)",
              seconds([&] { sink = forward_slices(env, {0, 0.0}, 8).back().values.back(); }));
  std::printf("%-36s %10.4f\n", "forward_slices_naive (same)",
              seconds([&] { sink = forward_slices_naive(env, {0, 0.0}, 8).back().values.back(); }));
  std::printf("%-36s %10.4f\n", "lpp_slices (same)",
              seconds([&] { sink = lpp_slices(env, {0, 0.0}, 8).back().values.back(); }));
  std::printf("%-36s %10.4f\n", "lpp_slices_naive (same)",
              seconds([&] { sink = lpp_slices_naive(env, {0, 0.0}, 8).back().values.back(); }));

  const TimeGrid big(0.0, 64.0, 0x1.0p-8);
  std::printf("%-36s %10.4f\n", "generate (16k pts, 65 levels)",
              seconds([&] { sink = Environment::generate(1, big, 0, 64).value(64, 100); }));

  const std::size_t reps = 16;
  std::vector<double> out(reps);
  auto replicate = [&](int workers) {
    return seconds([&] {
      parallel_for(reps, workers, [&](std::size_t e) {
        const Environment r = Environment::generate(derive_seed(3, e), big, 0, 16);
        out[e] = point_to_point_log_Z(r, {0, 0.0}, {16, 16.0});
      });
    });
  };
  std::printf("%-36s %10.4f\n", "16 replicates, 1 worker", replicate(1));
  std::printf("%-36s %10.4f  (%d threads)\n", "16 replicates, default workers", replicate(0), resolve_workers(0));
  return 0;
}
