#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace nilcurv {

/// Runs body(i) for i in [0, count) across a small thread pool. Each index is
/// processed exactly once; bodies must only write to index-private state so
/// results are identical regardless of scheduling.
inline void parallel_for_index(int count, const std::function<void(int)>& body) {
  if (count <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  int workers = static_cast<int>(hw == 0 ? 2 : hw);
  if (workers > count) workers = count;
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        body(i);
      }
    });
  for (auto& t : pool) t.join();
}

} // namespace nilcurv
