#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace conewave {

namespace detail {
inline std::atomic<std::size_t>& worker_setting() {
  static std::atomic<std::size_t> value{0};
  return value;
}
}  // namespace detail

/// Number of worker threads used by parallel_for. An explicit set_workers()
/// wins; otherwise CONEWAVE_WORKERS is consulted, falling back to 1.
inline std::size_t workers() {
  const std::size_t explicit_value = detail::worker_setting().load();
  if (explicit_value > 0) return explicit_value;
  if (const char* env = std::getenv("CONEWAVE_WORKERS")) {
    try {
      const long parsed = std::stol(env);
      if (parsed > 0) return static_cast<std::size_t>(parsed);
    } catch (...) {
    }
  }
  return 1;
}

inline void set_workers(std::size_t count) { detail::worker_setting().store(count); }

/// Runs body(i) for i in [0, count). Each index must write only its own
/// output; results are then independent of the worker count.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const std::size_t pool = std::min(workers(), count);
  if (pool <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    try {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(count);
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(pool - 1);
  for (std::size_t t = 1; t < pool; ++t) threads.emplace_back(run);
  run();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace conewave
