#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace girg {

/// Worker count for trial-parallel loops. Affects speed only: every loop
/// below splits work into fixed-size blocks that do not depend on `threads`,
/// and block results are reduced in block order.
struct Parallelism {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

inline constexpr std::uint64_t kBlockSize = 1 << 14;

/// Runs `block_fn(begin, end)` for consecutive blocks of [0, count) and
/// returns the per-block results in block order.
template <class Result, class BlockFn>
std::vector<Result> map_blocks(std::uint64_t count, Parallelism par, BlockFn&& block_fn,
                               std::uint64_t block_size = kBlockSize) {
  const std::uint64_t blocks = (count + block_size - 1) / block_size;
  std::vector<Result> results(blocks);
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, par.threads), blocks));
  if (workers <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b)
      results[b] = block_fn(b * block_size, std::min(count, (b + 1) * block_size));
    return results;
  }
  std::mutex error_mutex;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::uint64_t b = w; b < blocks; b += workers)
          results[b] = block_fn(b * block_size, std::min(count, (b + 1) * block_size));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

/// Counts indices in [0, count) for which `pred(i)` holds.
template <class Pred>
std::uint64_t parallel_count(std::uint64_t count, Parallelism par, Pred&& pred) {
  auto partial = map_blocks<std::uint64_t>(count, par, [&](std::uint64_t begin, std::uint64_t end) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = begin; i < end; ++i) hits += pred(i) ? 1 : 0;
    return hits;
  });
  std::uint64_t total = 0;
  for (auto h : partial) total += h;
  return total;
}

/// Evaluates `fn(i)` for every i and stores the results by index.
template <class Result, class Fn>
std::vector<Result> parallel_map(std::uint64_t count, Parallelism par, Fn&& fn) {
  std::vector<Result> out(count);
  map_blocks<char>(
      count, par,
      [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) out[i] = fn(i);
        return char{0};
      },
      1);
  return out;
}

}  // namespace girg
