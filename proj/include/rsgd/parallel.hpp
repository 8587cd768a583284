#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace rsgd {

/// Number of worker threads to use when the caller passes 0.
inline std::size_t default_threads() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Calls task(i) for every i in [0, count) on up to `threads` workers. Tasks
/// must write only to slots they own; results are then independent of the
/// thread count.
template <class Task>
void parallel_for(std::size_t count, std::size_t threads, Task&& task) {
  if (threads == 0) threads = default_threads();
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
}

}  // namespace rsgd
