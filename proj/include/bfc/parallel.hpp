#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace bfc {

/// Worker count from the BFC_WORKERS environment variable, falling back to
/// the hardware concurrency. Always at least 1.
inline unsigned default_worker_count() {
  if (const char* env = std::getenv("BFC_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw >= 1 ? hw : 1;
}

namespace detail {

template <typename Fn>
void run_on_threads(unsigned workers, Fn&& body) {
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::atomic_flag error_latch = ATOMIC_FLAG_INIT;
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        body(w);
      } catch (...) {
        if (!error_latch.test_and_set()) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failed.load() && first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

/// Splits [0, n) into `workers` contiguous chunks and runs fn(begin, end)
/// once per chunk. Results must be written to disjoint per-index slots so
/// the outcome is independent of the worker count.
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned workers, Fn&& fn) {
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  if (static_cast<std::size_t>(workers) > n) workers = static_cast<unsigned>(n);
  const std::size_t base = n / workers;
  const std::size_t extra = n % workers;
  detail::run_on_threads(workers, [&](unsigned w) {
    const std::size_t begin = w * base + (w < extra ? w : extra);
    const std::size_t end = begin + base + (w < extra ? 1 : 0);
    if (begin < end) fn(begin, end);
  });
}

/// Runs fn(i) for each i in [0, count) across a pool of workers pulling from
/// a shared counter. Task bodies must touch disjoint state per index.
template <typename Fn>
void parallel_tasks(std::size_t count, unsigned workers, Fn&& fn) {
  if (count == 0) return;
  if (workers <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  if (static_cast<std::size_t>(workers) > count) workers = static_cast<unsigned>(count);
  std::atomic<std::size_t> next{0};
  detail::run_on_threads(workers, [&](unsigned) {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      fn(i);
    }
  });
}

}  // namespace bfc
