// Compares the serial reference sweep engine against the OpenMP path and
// checks that both produce identical reports.

#include <chrono>
#include <cstdio>

#include "fidlab/sweep.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace fidlab;

double seconds(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

void compare(const char* label, const std::function<SweepReport(bool)>& run) {
  SweepReport serial, parallel;
  const double t_serial = seconds([&] { serial = run(false); });
  const double t_parallel = seconds([&] { parallel = run(true); });
  const bool identical =
      serial.to_json(false).dump() == parallel.to_json(false).dump() &&
      serial.margins == parallel.margins;
  std::printf("%-28s serial %7.3fs   openmp %7.3fs   speedup %5.2fx   %s\n", label,
              t_serial, t_parallel, t_serial / t_parallel,
              identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp not enabled; both runs are serial\n");
#endif

  compare("monotonicity d=8 n=400", [](bool parallel) {
    SweepConfig sc;
    sc.parallel = parallel;
    return monotonicity_sweep(ChannelSource::RandomCptp, 8, 400, 42, sc);
  });
  compare("monotonicity d=4 n=1000", [](bool parallel) {
    SweepConfig sc;
    sc.parallel = parallel;
    return monotonicity_sweep(ChannelSource::RandomCptp, 4, 1000, 42, sc);
  });
  compare("metric d=3 n=2000", [](bool parallel) {
    SweepConfig sc;
    sc.parallel = parallel;
    return metric_sweep(3, 2000, 42, sc);
  });
  return 0;
}
