#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace netdyad {

// Number of workers to use when the caller passes 0.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("NETDYAD_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, n) over `threads` workers using static
// contiguous blocks. The body must write only to slots owned by index i, so
// results never depend on the worker count. The first exception thrown by
// any worker is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t block = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * block;
    const std::size_t hi = std::min(n, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Variant handing each worker a private state object built by make_state().
template <typename MakeState, typename Body>
void parallel_for_with_state(std::size_t n, unsigned threads,
                             MakeState&& make_state, Body&& body) {
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::max<std::size_t>(
      1, std::min<std::size_t>(threads, n)));
  const std::size_t block = n == 0 ? 0 : (n + threads - 1) / threads;
  parallel_for(threads, threads, [&](std::size_t t) {
    auto state = make_state();
    const std::size_t lo = t * block;
    const std::size_t hi = std::min(n, lo + block);
    for (std::size_t i = lo; i < hi; ++i) body(state, i);
  });
}

}  // namespace netdyad
