#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

// Deterministic fork-join over an index range: results are collected by
// index, and each task derives its randomness from its own index, so the
// output is independent of the worker count.

namespace fpp {

inline int worker_count_from_env(int configured) {
  if (const char* env = std::getenv("FPP_WORKERS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return configured >= 1 ? configured : 1;
}

template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, int workers, Fn&& fn) {
  std::vector<T> results(count);
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      results[i] = fn(i);
    }
  };
  std::vector<std::thread> pool;
  int n = std::min<int>(workers, static_cast<int>(count));
  pool.reserve(n);
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace fpp
