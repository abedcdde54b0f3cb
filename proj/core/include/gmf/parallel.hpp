#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace gmf {

/// Runs body(i) for i in [begin, end) on up to `threads` workers pulling
/// indices from a shared counter. Each index must write only its own output
/// slot; with that discipline results are identical for any thread count.
/// The first exception thrown by a body is rethrown on the caller.
inline void parallel_for(long begin, long end, int threads,
                         const std::function<void(long)>& body) {
  const long count = end - begin;
  if (count <= 0) return;
  threads = static_cast<int>(std::max<long>(1, std::min<long>(threads, count)));
  if (threads == 1) {
    for (long i = begin; i < end; ++i) body(i);
    return;
  }
  std::atomic<long> next(begin);
  std::atomic<bool> failed(false);
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      while (!failed.load(std::memory_order_relaxed)) {
        const long i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= end) break;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline int default_thread_count() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace gmf
