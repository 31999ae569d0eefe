#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace monotest {

constexpr std::int64_t kChunkSize = 1 << 16;

/// Splits `total` work items into fixed-size chunks and runs
/// `body(chunk_id, begin, count)` for each chunk on up to `workers` threads.
/// Chunk boundaries do not depend on `workers`, so results built from
/// per-chunk RNG streams are identical for any worker count.
template <typename Body>
void for_each_chunk(std::int64_t total, int workers, Body&& body, std::int64_t chunk = kChunkSize) {
  const std::int64_t chunks = (total + chunk - 1) / chunk;
  auto run = [&](std::int64_t c) { body(c, c * chunk, std::min(chunk, total - c * chunk)); };
  if (workers <= 1 || chunks <= 1) {
    for (std::int64_t c = 0; c < chunks; ++c) run(c);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min<std::int64_t>(workers, chunks); ++w) {
    pool.emplace_back([&] {
      for (std::int64_t c; (c = next++) < chunks;) {
        try {
          run(c);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace monotest
