#include "ars/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>

namespace ars {

namespace {
std::atomic<int> g_cap{0};
}

int worker_count() {
  int cap = g_cap.load();
  if (cap > 0) return cap;
  {
    if (const char* env = std::getenv("ARS_ENGINE_THREADS")) {
      try {
        cap = std::stoi(env);
      } catch (...) {
        cap = 0;
      }
    }
  }
  int n = omp_get_max_threads();
  if (cap > 0 && cap < n) n = cap;
  return n < 1 ? 1 : n;
}

void set_worker_cap(int threads) { g_cap.store(threads < 0 ? 0 : threads); }

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

}  // namespace ars
