#ifndef RBSEG_PARALLEL_HPP
#define RBSEG_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rbseg {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Results land in
// index order, so output is independent of scheduling. The first exception
// thrown by any task is rethrown on the calling thread.
inline void parallel_for(std::size_t n, int workers,
                         const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t nthreads =
      std::min<std::size_t>(n, workers < 1 ? 1 : static_cast<std::size_t>(workers));
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

template <typename In, typename Out>
std::vector<Out> parallel_map(const std::vector<In>& items, int workers,
                              const std::function<Out(const In&, std::size_t)>& fn) {
  std::vector<Out> out(items.size());
  parallel_for(items.size(), workers,
               [&](std::size_t i) { out[i] = fn(items[i], i); });
  return out;
}

}  // namespace rbseg

#endif  // RBSEG_PARALLEL_HPP
