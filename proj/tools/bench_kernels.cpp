// Compares the serial reference matmul kernels against the OpenMP ones and
// verifies they agree bit for bit at each size.
#include <chrono>
#include <cstdio>

#include "ocdeepiv/matrix.hpp"
#include "ocdeepiv/rng.hpp"

using namespace ocdeepiv;

namespace {

template <typename F>
double time_best_of(F&& fn, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

void bench_case(std::size_t m, std::size_t k, std::size_t n, int reps) {
  RngStream rng(42, m * 1000003 + k * 1009 + n);
  Matrix a = rng.standard_normal(m, k);
  Matrix b = rng.standard_normal(k, n);

  Matrix ref = matmul_serial(a, b);
  Matrix omp = matmul(a, b);
  const bool same = ref == omp;

  const double ts = time_best_of([&] { matmul_serial(a, b); }, reps);
  const double tp = time_best_of([&] { matmul(a, b); }, reps);
  const double flops = 2.0 * static_cast<double>(m) * k * n;
  std::printf("%5zux%-4zu * %4zux%-5zu serial %8.3f ms (%6.2f GF/s)  omp %8.3f ms "
              "(%6.2f GF/s)  speedup %.2fx  bitmatch=%s\n",
              m, k, k, n, ts * 1e3, flops / ts * 1e-9, tp * 1e3, flops / tp * 1e-9,
              ts / tp, same ? "yes" : "NO");
}

}  // namespace

int main() {
  bench_case(256, 64, 64, 7);
  bench_case(2000, 64, 64, 7);
  bench_case(10000, 6, 64, 7);
  bench_case(10000, 64, 64, 5);
  bench_case(10000, 128, 64, 5);
  bench_case(512, 512, 512, 3);
  return 0;
}
