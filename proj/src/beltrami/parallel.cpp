#include "beltrami/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace beltrami {

int thread_count() {
  if (const char* env = std::getenv("BELTRAMI_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
  constexpr std::size_t kMinChunk = 4096;
  const auto workers = static_cast<std::size_t>(thread_count());
  const std::size_t chunks = std::min(workers, std::max<std::size_t>(1, count / kMinChunk));
  if (chunks <= 1) {
    body(0, count);
    return;
  }
  const std::size_t step = (count + chunks - 1) / chunks;
  std::vector<std::thread> pool;
  pool.reserve(chunks - 1);
  for (std::size_t c = 1; c < chunks; ++c) {
    const std::size_t lo = c * step;
    const std::size_t hi = std::min(count, lo + step);
    if (lo < hi) pool.emplace_back(body, lo, hi);
  }
  body(0, std::min(count, step));
  for (auto& t : pool) t.join();
}

}  // namespace beltrami
