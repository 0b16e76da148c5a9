#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

// Deterministic parallel evaluation. Work over [0, count) is split into
// fixed-size chunks; chunk results are merged by a pairwise tree over the
// chunk index. The floating-point result therefore depends only on the chunk
// size (a compile-time policy), never on the worker count, so COVCAP_THREADS
// can change wall time but not a single output bit.
namespace covcap::par {

inline constexpr std::size_t kChunk = 1024;

// Worker cap: COVCAP_THREADS if set (clamped to [1, 256]), else the hardware
// concurrency.
std::size_t worker_count();

// Runs fn(job_index) for every index in [0, jobs), distributing jobs over the
// workers. Rethrows the first exception raised by any job.
void run_indexed(std::size_t jobs, const std::function<void(std::size_t)>& fn);

// Evaluates map(begin, end) on each chunk of [0, count) and folds the chunk
// results with combine using a fixed pairwise tree. Returns identity when
// count == 0.
template <class T, class Map, class Combine>
T chunked_reduce(std::size_t count, Map map, Combine combine, T identity,
                 std::size_t chunk_size = kChunk) {
  if (count == 0) return identity;
  const std::size_t nchunks = (count + chunk_size - 1) / chunk_size;
  std::vector<T> results(nchunks, identity);
  run_indexed(nchunks, [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    const std::size_t end = begin + chunk_size < count ? begin + chunk_size : count;
    results[c] = map(begin, end);
  });
  while (results.size() > 1) {
    std::vector<T> next;
    next.reserve((results.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < results.size(); i += 2) {
      next.push_back(combine(std::move(results[i]), std::move(results[i + 1])));
    }
    if (results.size() % 2 == 1) next.push_back(std::move(results.back()));
    results = std::move(next);
  }
  return std::move(results.front());
}

// Runs fn(begin, end) over fixed chunks of [0, count), possibly concurrently.
// fn must only write to locations determined by the indices it receives.
template <class Fn>
void parallel_for_chunks(std::size_t count, Fn fn,
                         std::size_t chunk_size = kChunk) {
  if (count == 0) return;
  const std::size_t nchunks = (count + chunk_size - 1) / chunk_size;
  run_indexed(nchunks, [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    const std::size_t end = begin + chunk_size < count ? begin + chunk_size : count;
    fn(begin, end);
  });
}

}  // namespace covcap::par
