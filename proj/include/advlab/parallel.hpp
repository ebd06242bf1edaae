#ifndef ADVLAB_PARALLEL_HPP_
#define ADVLAB_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace advlab {

/// ADVLAB_THREADS if set to a positive integer, else the hardware concurrency.
inline int default_threads() {
  if (const char* env = std::getenv("ADVLAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i, worker) for i in [0, n) on up to `threads` workers. Work is
/// handed out dynamically, so fn must write results by index only. The first
/// exception thrown by fn is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
  threads = static_cast<int>(std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(n, 1)));
  if (threads == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i, 0);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::int64_t i = next++; i < n; i = next++) {
        try {
          fn(i, w);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace advlab

#endif  // ADVLAB_PARALLEL_HPP_
