#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dysonlab {

/// Worker count: `requested` if positive, else DYSONLAB_THREADS, else the
/// hardware concurrency (at least 1).
unsigned resolve_threads(unsigned requested = 0);

/// Runs f(i) for i in [0, count) on up to `threads` workers. Work items must
/// write only to their own slot, so results do not depend on scheduling. If
/// several items throw, the exception of the lowest index is rethrown.
template <typename F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
  if (count == 0) return;
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex guard;
  std::exception_ptr failure;
  std::size_t failure_index = count;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(guard);
        if (i < failure_index) {
          failure_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace dysonlab
