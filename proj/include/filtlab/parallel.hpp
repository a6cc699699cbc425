#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace filtlab {

// Thread count: FILTLAB_THREADS env var if set, else 1. Results must be
// byte-identical for any value, so parallelism is only ever over disjoint
// per-path slots plus sequential reductions.
inline unsigned thread_count() {
  if (const char* env = std::getenv("FILTLAB_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 256) return static_cast<unsigned>(v);
  }
  return 1;
}

// Runs fn(begin, end) over fixed-size blocks of [0, n). Block boundaries do
// not depend on the thread count, and each block writes only its own slots.
inline void parallel_for_blocks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                                std::size_t block = 2048) {
  if (n == 0) return;
  const unsigned workers = std::min<unsigned>(thread_count(), 64);
  const std::size_t n_blocks = (n + block - 1) / block;
  if (workers <= 1 || n_blocks <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b)
      fn(b * block, std::min(n, (b + 1) * block));
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      fn(b * block, std::min(n, (b + 1) * block));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace filtlab
