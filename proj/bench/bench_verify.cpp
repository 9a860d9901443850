// Serial vs OpenMP timing of the verification suites.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "hamtube/json_io.hpp"

using namespace hamtube;

namespace {

double seconds(const Suite& s, int points, bool parallel, Report* out) {
  FDConfig fd;
  auto t0 = std::chrono::steady_clock::now();
  *out = run_suite(s, points, 17, fd, parallel);
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int points = argc > 1 ? std::atoi(argv[1]) : 400;
  if (const char* t = std::getenv("HAMTUBE_THREADS"))
    if (std::atoi(t) > 0) omp_set_num_threads(std::atoi(t));
  std::printf("threads %d, points %d\n", thread_count(), points);
  std::printf("%-11s %10s %10s %8s %s\n", "suite", "serial s", "omp s", "speedup",
              "same");
  bool all_same = true;
  for (const char* name : {"simple", "restricted", "tube0", "general", "so3r3"}) {
    Suite s = suite_from_config(name, merged_config(name, json::object()));
    Report a, b;
    // warm up caches and the thread pool
    seconds(s, 4, true, &a);
    double ts = seconds(s, points, false, &a);
    double tp = seconds(s, points, true, &b);
    FDConfig fd;
    bool same = a.to_json(fd).dump() == b.to_json(fd).dump();
    all_same = all_same && same;
    std::printf("%-11s %10.4f %10.4f %8.2f %s\n", name, ts, tp, ts / tp,
                same ? "yes" : "NO");
  }
  return all_same ? 0 : 1;
}
