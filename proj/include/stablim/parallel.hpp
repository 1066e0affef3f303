#pragma once

#include <cstddef>
#include <functional>

namespace stablim {

// Worker count used by every parallel loop in the library. Defaults to the
// STABLIM_THREADS environment variable, else the hardware concurrency.
std::size_t thread_count();
void set_thread_count(std::size_t threads);

// Runs body(task) for task in [0, tasks). Tasks are claimed dynamically, so
// callers must write results into per-task slots and reduce them in task
// order afterwards; then the outcome does not depend on the worker count.
void parallel_for(std::size_t tasks, const std::function<void(std::size_t)>& body);

// Splits [0, total) into `chunks` nearly equal ranges; returns [begin, end)
// of range k.
struct Range {
  std::size_t begin;
  std::size_t end;
};
Range chunk_range(std::size_t total, std::size_t chunks, std::size_t k);

}  // namespace stablim
