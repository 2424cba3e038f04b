#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "critpol/cli/config.hpp"

namespace critpol::cli {

/// Cartesian product of the axes, first axis slowest.
inline std::vector<std::vector<double>> sweep_grid(const std::vector<SweepAxis>& axes) {
  std::vector<std::vector<double>> grid{{}};
  for (const auto& ax : axes) {
    std::vector<std::vector<double>> next;
    const auto vals = ax.values();
    next.reserve(grid.size() * vals.size());
    for (const auto& prefix : grid)
      for (double v : vals) {
        next.push_back(prefix);
        next.back().push_back(v);
      }
    grid = std::move(next);
  }
  return grid;
}

/// out[i] = f(i) for i < n on up to `threads` workers. Results land in index
/// order, so the output does not depend on scheduling.
template <class R, class F>
std::vector<R> parallel_map(std::size_t n, std::size_t threads, F f) {
  std::vector<R> out(n);
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          out[i] = f(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace critpol::cli
