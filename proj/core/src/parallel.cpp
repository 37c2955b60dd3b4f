#include "qpulse/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace qpulse {

unsigned worker_count() {
  if (const char* env = std::getenv("QPULSE_WORKERS")) {
    try {
      const long n = std::stol(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (...) {
      // fall through to hardware default on unparseable values
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += workers) fn(i);
    });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace qpulse
