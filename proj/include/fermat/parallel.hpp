// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace fermat::detail {

inline std::size_t resolve_threads(std::size_t requested, std::size_t count) {
  std::size_t threads = requested == 0 ? std::thread::hardware_concurrency() : requested;
  return std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
}

/// Runs fn(i) for i in [0, count) over contiguous chunks. Each index is
/// independent; if any calls throw, the exception of the lowest index is
/// rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = resolve_threads(threads, count);
  std::vector<std::exception_ptr> errors(count);
  auto run_chunk = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    run_chunk(0, count);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back(run_chunk, begin, end);
    }
    for (auto& w : workers) w.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace fermat::detail
