#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace subwave {

/// Runs body(i) for i in [0, n) on up to `threads` workers, each taking one
/// contiguous block. Results must be written to disjoint slots; the first
/// exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(int n, int threads, Body&& body) {
  threads = std::clamp(threads, 1, std::max(1, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = n * t / threads; i < n * (t + 1) / threads; ++i) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace subwave
