#include "stablim/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace stablim {

namespace {

std::size_t initial_thread_count() {
  if (const char* env = std::getenv("STABLIM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<std::size_t>& configured_threads() {
  static std::atomic<std::size_t> n{initial_thread_count()};
  return n;
}

}  // namespace

std::size_t thread_count() { return configured_threads().load(); }

void set_thread_count(std::size_t threads) { configured_threads() = std::max<std::size_t>(1, threads); }

void parallel_for(std::size_t tasks, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(thread_count(), tasks);
  if (workers <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) body(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks) return;
      try {
        body(t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

Range chunk_range(std::size_t total, std::size_t chunks, std::size_t k) {
  const std::size_t base = total / chunks;
  const std::size_t extra = total % chunks;
  const std::size_t begin = k * base + std::min(k, extra);
  return {begin, begin + base + (k < extra ? 1 : 0)};
}

}  // namespace stablim
