#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace bbs {

// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = one per
// hardware thread).  Work is split by index, so results written to
// per-index slots are deterministic regardless of the thread count.
inline void parallel_for(std::int64_t count,
                         const std::function<void(std::int64_t)>& fn,
                         int threads = 0) {
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (threads == 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(
      std::min<std::int64_t>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::int64_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace bbs
