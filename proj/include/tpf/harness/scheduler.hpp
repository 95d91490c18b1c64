#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tpf::harness {

// Runs fn(r) for r = 0..R-1 on up to `workers` threads and returns the
// results in replicate order. Each replicate draws only from its own stream
// coordinates, so the output does not depend on the schedule.
template <class T, class F>
std::vector<T> run_replicates(std::size_t R, std::size_t workers, F&& fn) {
  std::vector<T> out(R);
  workers = std::max<std::size_t>(1, std::min(workers, R));
  if (workers == 1) {
    for (std::size_t r = 0; r < R; ++r) out[r] = fn(r);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  const auto work = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= R) return;
      try {
        out[r] = fn(r);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!err) err = std::current_exception();
        next.store(R);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace tpf::harness
