#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace weakot {

// Worker count: WEAKOT_THREADS if set and positive, else the hardware concurrency.
inline unsigned worker_count() {
  if (const char* e = std::getenv("WEAKOT_THREADS")) {
    try {
      const int v = std::stoi(e);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, n) on contiguous blocks. Results must be written per index, so the
// outcome does not depend on the number of workers. The first exception is rethrown.
template <class F>
void parallel_for(std::size_t n, F&& body) {
  const std::size_t w = std::min<std::size_t>(worker_count(), n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr err;
  std::mutex m;
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < w; ++k) {
    pool.emplace_back([&, k] {
      const std::size_t lo = n * k / w, hi = n * (k + 1) / w;
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

} // namespace weakot
