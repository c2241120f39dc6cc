#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "dal/types.hpp"

namespace dal {

namespace detail {
inline int& thread_setting() {
  static int n = 0;  // 0 = unresolved
  return n;
}
}  // namespace detail

/// Worker-pool width for sample-level fan-out. Defaults to DAL_THREADS when
/// set, otherwise 1; results never depend on it because every work item
/// writes to its own slot.
inline void set_max_threads(int n) { detail::thread_setting() = n > 0 ? n : 1; }

inline int max_threads() {
  int& n = detail::thread_setting();
  if (n == 0) {
    if (const char* env = std::getenv("DAL_THREADS")) {
      int v = std::atoi(env);
      n = v > 0 ? v : 1;
    } else {
      n = 1;
    }
  }
  return n;
}

/// Runs fn(i) for i in [0, n); work items must write to disjoint state.
inline void parallel_for(Index n, const std::function<void(Index)>& fn) {
  int threads = max_threads();
  if (threads > n) threads = static_cast<int>(n);
  if (threads <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        Index i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dal
