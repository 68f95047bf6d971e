#pragma once

// Minimal fork-join helper. Thread count resolution: explicit request, then
// the SEMIFORGE_THREADS environment variable, then hardware concurrency.

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace semiforge {

inline int resolve_threads(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SEMIFORGE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

inline int chunk_count(int items, int threads) {
  threads = resolve_threads(threads);
  if (threads > items) threads = items > 0 ? items : 1;
  int chunk = (items + threads - 1) / threads;
  return items > 0 ? (items + chunk - 1) / chunk : 0;
}

// Splits [0, items) into at most `threads` contiguous chunks and runs
// fn(chunk_index, begin, end) on each. Results must be written to
// per-chunk slots; chunk boundaries are deterministic.
template <class Fn>
inline int run_chunked(int items, int threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (threads > items) threads = items > 0 ? items : 1;
  int chunk = (items + threads - 1) / threads;
  int nchunks = items > 0 ? (items + chunk - 1) / chunk : 0;
  if (threads <= 1 || nchunks <= 1) {
    for (int i = 0; i < nchunks; ++i)
      fn(i, i * chunk, std::min(items, (i + 1) * chunk));
    return nchunks;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(nchunks));
  for (int i = 0; i < nchunks; ++i)
    pool.emplace_back([&fn, i, chunk, items] { fn(i, i * chunk, std::min(items, (i + 1) * chunk)); });
  for (auto& t : pool) t.join();
  return nchunks;
}

}  // namespace semiforge
