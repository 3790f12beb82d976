#ifndef GRADLIM_PARALLEL_HPP
#define GRADLIM_PARALLEL_HPP

#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace gradlim {

inline unsigned worker_count() {
  if (const char* env = std::getenv("GRADLIM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// Deterministic block map-reduce. The replication range is cut into
/// fixed-size blocks; each block produces one partial of type Acc and
/// partials are merged in block order, so the result is bit-identical for
/// any worker count. `block_fn(first, last)` must derive its own RNG
/// sub-streams from the replication indices it is given.
template <typename Acc, typename BlockFn, typename MergeFn>
Acc block_reduce(std::uint64_t total, std::uint64_t block_size,
                 BlockFn&& block_fn, MergeFn&& merge, Acc init) {
  if (block_size == 0) block_size = 1;
  const std::uint64_t n_blocks = (total + block_size - 1) / block_size;
  std::vector<Acc> partials(n_blocks, init);

  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(worker_count(), n_blocks));
  if (workers <= 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) {
      const std::uint64_t lo = b * block_size;
      const std::uint64_t hi = std::min(total, lo + block_size);
      partials[b] = block_fn(lo, hi);
    }
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t b = w; b < n_blocks; b += workers) {
          const std::uint64_t lo = b * block_size;
          const std::uint64_t hi = std::min(total, lo + block_size);
          partials[b] = block_fn(lo, hi);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  Acc out = init;
  for (const Acc& p : partials) out = merge(out, p);
  return out;
}

}  // namespace gradlim

#endif
