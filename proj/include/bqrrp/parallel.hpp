#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace bqrrp {

namespace detail {
inline int& thread_cap() {
  static int cap = [] {
    if (const char* env = std::getenv("BQRRP_THREADS")) {
      try {
        return std::max(1, std::stoi(env));
      } catch (...) {
      }
    }
    return 1;
  }();
  return cap;
}
}  // namespace detail

/// Cap on kernel-internal threads. Defaults to $BQRRP_THREADS, else 1.
inline int num_threads() { return detail::thread_cap(); }
inline void set_num_threads(int n) { detail::thread_cap() = std::max(1, n); }

/// Runs body(begin, end) over [0, count) split into contiguous chunks.
/// Chunks never share output, so results do not depend on the thread count.
template <typename Body>
void parallel_for(std::int64_t count, std::int64_t min_chunk, Body&& body) {
  const int threads = static_cast<int>(std::min<std::int64_t>(
      num_threads(), std::max<std::int64_t>(1, count / std::max<std::int64_t>(1, min_chunk))));
  if (threads <= 1) {
    body(std::int64_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads - 1));
  const std::int64_t per = (count + threads - 1) / threads;
  for (int t = 1; t < threads; ++t) {
    const std::int64_t b = t * per;
    const std::int64_t e = std::min(count, b + per);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
  body(std::int64_t{0}, std::min(count, per));
  for (auto& th : pool) th.join();
}

}  // namespace bqrrp
