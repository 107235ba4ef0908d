#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qnil::detail {

/// Splits [0, count) into at most `workers` contiguous chunks and runs
/// fn(chunk, begin, end) for each, one thread per chunk. Chunk boundaries
/// depend only on (count, workers); callers that write per-chunk outputs and
/// concatenate them in chunk order get results independent of scheduling.
template <class Fn>
void for_each_chunk(std::size_t count, unsigned workers, Fn&& fn) {
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers, count));
  if (chunks == 1) {
    fn(std::size_t{0}, std::size_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::thread> threads;
  threads.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = count * c / chunks;
    const std::size_t end = count * (c + 1) / chunks;
    threads.emplace_back([&, c, begin, end] {
      try {
        fn(c, begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::size_t chunk_count(std::size_t count, unsigned workers) {
  return std::max<std::size_t>(1, std::min<std::size_t>(workers, count));
}

}  // namespace qnil::detail
