#pragma once

#include <cstddef>
#include <functional>

namespace panqa {

// Worker count: PANQA_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

// Runs fn(i) for i in [0, n). Each index is handled by exactly one worker;
// callers that reduce must write to per-index slots and merge in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace panqa
