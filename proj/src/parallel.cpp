// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hdgmd {

int thread_count() {
  if (const char* env = std::getenv("HDG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n, const std::function<void(int, int)>& fn) {
  if (n <= 0) return;
  const int nthreads = std::min(thread_count(), n);
  if (nthreads <= 1) {
    fn(0, n);
    return;
  }
  // Fixed chunking: results must not depend on the thread count, so each
  // chunk writes only to its own output slots.
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  const int chunk = (n + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(fn, begin, end);
  }
  for (auto& th : pool) th.join();
}

} // namespace hdgmd
