#pragma once

// Index-based work distribution. Results must be written into per-index
// slots by the callback, so the output is identical for any worker count or
// schedule; determinism comes from seeding by index, never by thread.

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace mixcirc {

inline void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = 1;
  threads = std::min(threads, count);
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (;;) {
        const int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          if (!errors[static_cast<std::size_t>(t)]) {
            errors[static_cast<std::size_t>(t)] = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace mixcirc
