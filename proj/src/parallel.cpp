#include "concord/parallel.hpp"

#include <atomic>
#include <cstdlib>

namespace concord {

namespace {

int initial_threads() {
  if (const char* env = std::getenv("CONCORD_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 0;
}

std::atomic<int> g_threads{initial_threads()};

}  // namespace

int thread_count() {
  const int n = g_threads.load();
  if (n > 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_thread_count(int n) { g_threads.store(n < 0 ? 0 : n); }

}  // namespace concord
