#pragma once

// Index-parallel map used by every grid reduction. Results are stored by
// index and reduced sequentially by callers, so outputs never depend on how
// the index range is partitioned.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gradcert {

/// Worker count: GRADCERT_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
std::size_t thread_count();

template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, F&& f) {
  std::vector<T> out(n);
  const std::size_t workers = std::min(thread_count(), std::max<std::size_t>(n / 64, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> error_index(workers, n);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        for (std::size_t i = begin; i < end; ++i) {
          try {
            out[i] = f(i);
          } catch (...) {
            errors[w] = std::current_exception();
            error_index[w] = i;
            return;
          }
        }
      });
    }
  }
  // Rethrow the failure with the smallest index, as a serial loop would.
  std::size_t best = workers;
  for (std::size_t w = 0; w < workers; ++w)
    if (errors[w] && (best == workers || error_index[w] < error_index[best])) best = w;
  if (best != workers) std::rethrow_exception(errors[best]);
  return out;
}

}  // namespace gradcert
