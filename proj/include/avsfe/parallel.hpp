#pragma once

#include <thread>
#include <vector>

namespace avsfe {

void set_num_threads(int n);
int num_threads();

// Static partition over [0, n). Results must be written to caller-owned
// per-index slots; reductions happen outside in index order so output is
// independent of the thread count.
template <class F>
void parallel_for(int n, F&& fn) {
  const int nt = std::min(num_threads(), n > 0 ? n : 1);
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    const int lo = static_cast<int>(static_cast<long long>(n) * t / nt);
    const int hi = static_cast<int>(static_cast<long long>(n) * (t + 1) / nt);
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

} // namespace avsfe
