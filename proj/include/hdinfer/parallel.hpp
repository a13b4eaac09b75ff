#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace hdinfer {

// Runs fn(begin, end) over [0, count) in fixed-size chunks. Chunk boundaries
// depend only on chunk_size, never on the thread count, so any work that is
// deterministic per chunk and writes to disjoint slots produces identical
// results for every value of threads.
inline void parallel_for_chunks(std::int64_t count, std::int64_t chunk_size, int threads,
                                const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (count <= 0) return;
  if (chunk_size <= 0) chunk_size = 1;
  const std::int64_t n_chunks = (count + chunk_size - 1) / chunk_size;
  threads = std::max(1, threads);
  if (threads == 1 || n_chunks == 1) {
    for (std::int64_t c = 0; c < n_chunks; ++c)
      fn(c * chunk_size, std::min(count, (c + 1) * chunk_size));
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      fn(c * chunk_size, std::min(count, (c + 1) * chunk_size));
    }
  };
  std::vector<std::thread> pool;
  const int n_workers = static_cast<int>(std::min<std::int64_t>(threads, n_chunks));
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace hdinfer
