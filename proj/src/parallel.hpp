#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace specproj::detail {

// Replicates are dealt to threads in fixed blocks of this size; state indexed
// by block (k / kReplicateBlock) is touched by exactly one thread.
inline constexpr int kReplicateBlock = 16;

// Runs body(k) for k in [0, count) across a small thread pool. Work is dealt
// in fixed blocks so callers can keep per-index or per-block storage and
// reduce it in index order afterwards; results are then independent of
// scheduling. body must only touch state owned by index k (or its block).
inline void parallel_replicates(int count, const std::function<void(int)>& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<unsigned>(hw, 8));
  if (count <= 1 || workers == 1) {
    for (int k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<int> next{0};
  auto run = [&] {
    for (;;) {
      const int begin = next.fetch_add(kReplicateBlock);
      if (begin >= count) return;
      const int end = std::min(begin + kReplicateBlock, count);
      for (int k = begin; k < end; ++k) body(k);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (std::thread& t : pool) t.join();
}

}  // namespace specproj::detail
