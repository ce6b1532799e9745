// Times the OpenMP benchmark sweep against the serial reference and checks
// that both produce the same table.
//
//   bench_sweep [n_envs] [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "mracrl/benchmark.hpp"

namespace {

template <class F>
double time_best(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s < best) best = s;
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mracrl;
  const std::size_t n_envs = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 64;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  if (n_envs == 0 || repeats < 1) {
    std::fprintf(stderr, "usage: bench_sweep [n_envs>=1] [repeats>=1]\n");
    return 2;
  }

  int mismatches = 0;
  std::printf("threads=%d n_envs=%zu repeats=%d (best of)\n", omp_get_max_threads(), n_envs,
              repeats);
  std::printf("%-10s %12s %12s %9s %s\n", "form", "serial[s]", "openmp[s]", "speedup", "tables");
  for (Form form : {Form::kLinear, Form::kNonlinear}) {
    std::vector<BenchVariant> variants;
    for (const char* name : {"lqr-direct100", "lqr-mrac100", "lqr-direct10", "lqr-mrac10"}) {
      variants.push_back(make_variant(name, form));
    }
    BenchmarkTable serial, parallel;
    const double ts = time_best(repeats, [&] {
      serial = run_benchmark_serial(n_envs, variants, 7, form);
    });
    const double tp = time_best(repeats, [&] {
      parallel = run_benchmark(n_envs, variants, 7, form);
    });
    const bool same = serial == parallel;
    if (!same) ++mismatches;
    std::printf("%-10s %12.4f %12.4f %9.2f %s\n", std::string(to_string(form)).c_str(), ts, tp,
                ts / tp, same ? "identical" : "DIFFER");
  }
  return mismatches == 0 ? 0 : 1;
}
