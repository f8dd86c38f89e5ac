#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace nanoplate {

/// Runs body(chunk_begin, chunk_end, chunk_index) over [0, n) split into
/// `threads` contiguous chunks. Callers reduce per-chunk results in chunk
/// order, so the outcome does not depend on scheduling. threads <= 1 runs inline.
template <class Body>
void parallel_chunks(int n, int threads, Body&& body) {
  const int workers = std::clamp(threads, 1, std::max(1, n));
  if (workers == 1) {
    body(0, n, 0);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int begin = static_cast<int>(static_cast<long long>(n) * w / workers);
    const int end = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
    pool.emplace_back([&, begin, end, w] {
      try {
        body(begin, end, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline int chunk_count(int n, int threads) { return std::clamp(threads, 1, std::max(1, n)); }

}  // namespace nanoplate
