#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace srskit {

/// Worker count used by parallel_for. Initialized from SRSKIT_THREADS, else
/// the hardware concurrency.
int thread_count();

/// Caps the worker pool (values < 1 reset to the default).
void set_thread_count(int threads);

/// Runs fn(i) for i in [0, count). Each index must write only its own output
/// slot; results are then independent of the worker count.
template <typename Fn>
void parallel_for(Eigen::Index count, Fn&& fn) {
  const int workers = static_cast<int>(std::min<Eigen::Index>(thread_count(), count));
  if (workers <= 1) {
    for (Eigen::Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<Eigen::Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (Eigen::Index i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace srskit
