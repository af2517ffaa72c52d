#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace bqrrp {

/// Live/peak element counters for every buffer the library allocates.
///
/// All internal workspaces (matrices, index vectors, scratch) go through
/// TrackedAllocator, so a caller can bracket a call with reset_peak() and
/// peak_words() to measure the auxiliary storage a routine really needs.
/// One "word" is one element, regardless of element type.
namespace memory {

inline std::atomic<std::int64_t>& live_counter() {
  static std::atomic<std::int64_t> live{0};
  return live;
}

inline std::atomic<std::int64_t>& peak_counter() {
  static std::atomic<std::int64_t> peak{0};
  return peak;
}

inline void note_alloc(std::int64_t words) {
  auto now = live_counter().fetch_add(words) + words;
  auto prev = peak_counter().load();
  while (now > prev && !peak_counter().compare_exchange_weak(prev, now)) {
  }
}

inline void note_free(std::int64_t words) { live_counter().fetch_sub(words); }

inline std::int64_t live_words() { return live_counter().load(); }
inline std::int64_t peak_words() { return peak_counter().load(); }
inline void reset_peak() { peak_counter().store(live_counter().load()); }

}  // namespace memory

template <typename T>
struct TrackedAllocator {
  using value_type = T;

  TrackedAllocator() noexcept = default;
  template <typename U>
  TrackedAllocator(const TrackedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    T* p = std::allocator<T>{}.allocate(n);
    memory::note_alloc(static_cast<std::int64_t>(n));
    return p;
  }

  void deallocate(T* p, std::size_t n) noexcept {
    memory::note_free(static_cast<std::int64_t>(n));
    std::allocator<T>{}.deallocate(p, n);
  }

  template <typename U>
  bool operator==(const TrackedAllocator<U>&) const noexcept { return true; }
};

using Workspace = std::vector<double, TrackedAllocator<double>>;
using IndexBuffer = std::vector<std::int64_t, TrackedAllocator<std::int64_t>>;

}  // namespace bqrrp
