#include "nozzleflow/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace nozzleflow {

int worker_count() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NOZZLEFLOW_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return static_cast<int>(hw);
}

void parallel_for(int n, const std::function<void(int, int)>& body) {
  const int workers = std::min(worker_count(), std::max(1, n / 256));
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int begin = int(std::int64_t(n) * w / workers), end = int(std::int64_t(n) * (w + 1) / workers);
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
}

}  // namespace nozzleflow
