#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace qic {

inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Evaluates fn(i) for i in [0, count) on up to `workers` threads and returns
/// the results indexed by i, so any later reduction runs in index order no
/// matter how the work was split.
template <class Result, class Fn>
std::vector<Result> parallel_map(std::size_t count, unsigned workers, Fn&& fn) {
  std::vector<Result> out(count);
  const std::size_t w = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(count, 1));
  if (w <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      try {
        const std::size_t lo = count * t / w, hi = count * (t + 1) / w;
        for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace qic
