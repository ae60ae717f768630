#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spectral_frechet {

/// Worker cap. SPECTRAL_FRECHET_THREADS=0 (or unset) means one per core.
inline unsigned max_threads() {
  if (const char* env = std::getenv("SPECTRAL_FRECHET_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs f(i) for i in [0, count) on up to max_threads() workers.
///
/// Work items are claimed dynamically, so f must write results into disjoint
/// slots indexed by i; any reduction over those slots belongs in the caller,
/// in index order, to keep floating-point results run-to-run identical.
template <typename F>
void parallel_for(std::size_t count, F&& f) {
  const std::size_t workers = std::min<std::size_t>(max_threads(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        f(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 0; t + 1 < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace spectral_frechet
