#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace airgrid {

// Fixed block decomposition executed by a transient thread team. Blocks are
// claimed from a shared counter, but each block's output location depends only
// on its index, so results are identical for any worker count.
inline void run_blocks(size_t n_items, size_t block_size, int workers,
                       const std::function<void(size_t begin, size_t end)>& fn) {
  if (n_items == 0) return;
  if (block_size == 0) block_size = 1;
  const size_t n_blocks = (n_items + block_size - 1) / block_size;
  if (workers <= 1 || n_blocks == 1) {
    for (size_t b = 0; b < n_blocks; ++b)
      fn(b * block_size, std::min(n_items, (b + 1) * block_size));
    return;
  }
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (;;) {
      const size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      fn(b * block_size, std::min(n_items, (b + 1) * block_size));
    }
  };
  std::vector<std::thread> team;
  const size_t n_threads = std::min<size_t>(static_cast<size_t>(workers), n_blocks);
  team.reserve(n_threads);
  for (size_t i = 0; i < n_threads; ++i) team.emplace_back(work);
  for (auto& t : team) t.join();
}

// Runs n_jobs independent jobs; job i writes only to its own result slot.
inline void run_jobs(size_t n_jobs, int workers, const std::function<void(size_t job)>& fn) {
  run_blocks(n_jobs, 1, workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) fn(i);
  });
}

}  // namespace airgrid
