#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace nsm {

/// Worker count: explicit override (CLI --threads), else NSM_THREADS env
/// var, else hardware concurrency. Always >= 1.
std::size_t thread_count();
void set_thread_override(std::size_t n);  // 0 clears the override

/// Runs fn(begin, end) over static contiguous chunks of [0, n). Chunk
/// boundaries depend only on n and the worker count; every chunk writes
/// disjoint output, so results never depend on scheduling.
template <typename Fn>
void parallel_for_chunks(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min(thread_count(), n == 0 ? 1 : n);
  if (n == 0) return;
  if (workers <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace nsm
