#pragma once

#include <cstddef>
#include <functional>

namespace beltrami {

// Worker count: BELTRAMI_THREADS when set (>= 1), else hardware concurrency.
int thread_count();

// Runs body(begin, end) over disjoint chunks of [0, count). Each index is
// touched by exactly one call, so element-wise results do not depend on the
// number of threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace beltrami
