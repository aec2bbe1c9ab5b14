#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace twinbeam {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) {
    return requested;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for every i in [begin, end), distributing indices dynamically
/// over worker threads. The first exception thrown by any call is rethrown.
template <class Fn>
void parallel_for(long begin, long end, unsigned threads, Fn&& fn) {
  if (end <= begin) {
    return;
  }
  const unsigned workers =
      std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(end - begin));
  if (workers <= 1) {
    for (long i = begin; i < end; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<long> next{begin};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) {
        return;
      }
      const long i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= end) {
        return;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned t = 1; t < workers; ++t) {
    pool.emplace_back(work);
  }
  work();
  pool.clear();
  if (error) {
    std::rethrow_exception(error);
  }
}

}  // namespace twinbeam
