#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "errors.hpp"
#include "memory.hpp"

namespace bqrrp {

/// True when x holds each of 1..x.size() exactly once.
inline bool is_permutation(std::span<const std::int64_t> x) {
  const auto n = static_cast<std::int64_t>(x.size());
  std::vector<bool> seen(x.size(), false);
  for (std::int64_t v : x) {
    if (v < 1 || v > n || seen[static_cast<std::size_t>(v - 1)]) return false;
    seen[static_cast<std::size_t>(v - 1)] = true;
  }
  return true;
}

/// One-based column permutation in gather form: column j of M(:, J) is
/// column J[j] - 1 of M. This is the pivot format GEQP3 returns.
class PivotVector {
 public:
  PivotVector() = default;
  explicit PivotVector(std::int64_t n) : entries_(static_cast<std::size_t>(n)) {
    for (std::int64_t i = 0; i < n; ++i) entries_[static_cast<std::size_t>(i)] = i + 1;
  }
  PivotVector(std::initializer_list<std::int64_t> values)
      : entries_(values.begin(), values.end()) {}
  explicit PivotVector(std::span<const std::int64_t> values)
      : entries_(values.begin(), values.end()) {}

  static PivotVector identity(std::int64_t n) { return PivotVector(n); }

  std::int64_t size() const noexcept {
    return static_cast<std::int64_t>(entries_.size());
  }
  std::int64_t operator[](std::int64_t j) const noexcept {
    return entries_[static_cast<std::size_t>(j)];
  }
  std::int64_t& operator[](std::int64_t j) noexcept {
    return entries_[static_cast<std::size_t>(j)];
  }
  /// Zero-based source column for output position j.
  std::int64_t source(std::int64_t j) const noexcept { return (*this)[j] - 1; }

  std::span<std::int64_t> span() noexcept { return entries_; }
  std::span<const std::int64_t> span() const noexcept { return entries_; }

  bool valid() const { return is_permutation(span()); }
  void validate() const {
    if (!valid()) throw FormatError("pivot vector is not a permutation of 1..n");
  }

  friend bool operator==(const PivotVector& a, const PivotVector& b) {
    return a.entries_ == b.entries_;
  }

 private:
  IndexBuffer entries_;
};

}  // namespace bqrrp
