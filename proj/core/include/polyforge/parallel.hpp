#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace polyforge {

/// Runs fn(i) for i in [0, count) on `jobs` worker threads pulling from a
/// shared index counter. jobs <= 1 degenerates to a plain loop.
template <typename Fn>
void parallel_for_indexed(std::size_t count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) break;
      fn(i);
    }
  };
  std::vector<std::thread> threads;
  const int n = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  threads.reserve(n);
  for (int t = 0; t < n; ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
}

}  // namespace polyforge
