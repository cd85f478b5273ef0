#pragma once

#include <cstddef>
#include <functional>

namespace mobhoro {

// Process-wide default worker count; 0 means std::thread::hardware_concurrency().
void set_default_threads(unsigned threads) noexcept;
unsigned default_threads() noexcept;

// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries are a
// function of n and the thread count only; callers write results by index and
// reduce afterwards, so output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace mobhoro
