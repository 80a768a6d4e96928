#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace toiep {

// Runs f(i) for i in [0, count) on up to hardware_concurrency threads.
// Callers write results into pre-sized slots, so merges stay deterministic.
template <class F>
void parallel_for(int count, F&& f, unsigned threads = 0) {
  unsigned hw = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  hw = std::min<unsigned>(hw, static_cast<unsigned>(std::max(count, 0)));
  if (hw <= 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex mu;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < hw; ++t)
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            f(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!err) err = std::current_exception();
          }
        }
      });
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace toiep
