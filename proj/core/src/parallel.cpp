#include "rigidflow/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace rigidflow {

int worker_count() {
  int n = 0;
  if (const char* env = std::getenv("RIGIDFLOW_THREADS")) n = std::atoi(env);
  if (n <= 0) n = int(std::thread::hardware_concurrency());
  return std::max(1, n);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace rigidflow
