#pragma once

#include <algorithm>
#include <thread>
#include <vector>

#include "concord/types.hpp"

namespace concord {

/// Worker count used by parallel loops. Resolves to the hardware concurrency
/// when unset; the CONCORD_THREADS environment variable provides the initial
/// value.
int thread_count();
void set_thread_count(int n);

/// Runs fn(lo, hi) over a partition of [begin, end) with one contiguous chunk
/// per worker. fn must only write to state owned by its own index range, which
/// keeps results independent of the schedule.
template <typename Fn>
void parallel_chunks(Index begin, Index end, Fn&& fn) {
  const Index total = end - begin;
  if (total <= 0) return;
  const int workers = std::max(1, std::min<int>(thread_count(), static_cast<int>(total)));
  if (workers == 1 || total < 2048) {
    fn(begin, end);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const Index chunk = (total + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    const Index lo = begin + t * chunk;
    const Index hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace concord
