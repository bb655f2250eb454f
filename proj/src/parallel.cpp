#include "avsfe/parallel.hpp"

#include <algorithm>
#include <cstdlib>

namespace avsfe {

namespace {
int g_threads = 0;
}

void set_num_threads(int n) { g_threads = std::max(0, n); }

int num_threads() {
  if (g_threads > 0) return g_threads;
  if (const char* env = std::getenv("AVSFE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

} // namespace avsfe
