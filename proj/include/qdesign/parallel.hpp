#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace qdesign {

// Default worker count: QDESIGN_THREADS when set and positive, else the
// hardware concurrency (at least 1).
unsigned default_threads();

// Splits [0, n) into `workers` contiguous chunks and runs
// fn(worker, begin, end) on each. Chunk boundaries depend only on n and
// workers. The first exception thrown by any worker is rethrown.
template <class Fn>
void parallel_chunks(unsigned workers, std::uint64_t n, Fn&& fn) {
  workers = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, n)));
  if (workers == 1) {
    fn(0u, std::uint64_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = n * w / workers;
    const std::uint64_t end = n * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(w, begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace qdesign
