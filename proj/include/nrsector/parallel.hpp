/*
 * parallel.hpp: a static-partition parallel for loop.
 *
 * Thread count comes from the NRSECTOR_THREADS environment variable, else
 * std::thread::hardware_concurrency(). Workers receive disjoint index
 * ranges; combined with per-index RNG substreams this keeps every result
 * independent of the thread count.
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nrsector {

inline unsigned thread_count() {
  if (const char* env = std::getenv("NRSECTOR_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Runs body(i) for i in [0, count) across threads. The first exception
// thrown by any worker is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::int64_t count, const Body& body) {
  if (count <= 0) return;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::int64_t>(thread_count(), count));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::int64_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::int64_t begin = static_cast<std::int64_t>(w) * chunk;
    const std::int64_t end = std::min(begin + chunk, count);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::int64_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace nrsector
